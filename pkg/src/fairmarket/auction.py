"""Individual provider fairness via an artificial-currency market.

Providers receive purchasing-parity budgets (each class controls half
the total budget), then bid in sealed second-price auctions for
reserved slate slots as recommendation opportunities stream in.  Bids
scale with remaining budget and candidate quality and shrink as fewer
opportunities remain, so budgets draw down smoothly over the horizon.
"""

from dataclasses import dataclass, field


@dataclass(frozen=True)
class AuctionConfig:
    total_budget: float  # artificial currency shared by all providers
    k_auction: int  # slate slots filled by auction, <= k
    horizon: int  # total opportunities in the run
    reserve_price: float = 0.0
    placement: str = "merged"  # merged | top

    def validate(self, k=None):
        if self.total_budget <= 0.0:
            raise ValueError("total_budget must be > 0")
        if self.k_auction < 0:
            raise ValueError("k_auction must be >= 0")
        if k is not None and self.k_auction > k:
            raise ValueError("k_auction cannot exceed k")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if self.reserve_price < 0.0:
            raise ValueError("reserve_price must be >= 0")
        if self.placement not in ("merged", "top"):
            raise ValueError("placement must be 'merged' or 'top'")


@dataclass
class ProviderAgent:
    provider_id: int
    initial_budget: float
    remaining_budget: float
    wins: int = 0
    spend: float = 0.0


@dataclass(frozen=True)
class SlotAuction:
    """One auctioned slot: every bid plus the sale outcome (if any)."""

    t: int
    slot: int
    bids: tuple  # ((provider_id, bid), ...) ascending by provider id
    winner: int | None
    price: float | None
    item_id: int | None


class AuctionLedger:
    """Ordered log of slot auctions across the opportunity stream."""

    def __init__(self):
        self.slots = []

    def extend(self, entries):
        self.slots.extend(entries)

    def bid_rows(self):
        """One (t, slot, provider_id, bid, won, price, item_id) per bid."""
        for entry in self.slots:
            for provider_id, bid in entry.bids:
                won = entry.winner == provider_id
                yield (
                    entry.t,
                    entry.slot,
                    provider_id,
                    bid,
                    int(won),
                    entry.price if won else None,
                    entry.item_id if won else None,
                )


def allocate_budgets(total_budget, n_protected, n_unprotected):
    """Purchasing-parity split: each class controls half the budget.

    Returns (per protected provider, per unprotected provider) amounts,
    i.e. B/(2p) and B/(2q).
    """
    if total_budget <= 0.0:
        raise ValueError("total_budget must be > 0")
    if n_protected < 1 or n_unprotected < 1:
        raise ValueError(
            "purchasing parity needs at least one provider in each class"
        )
    return (
        total_budget / (2.0 * n_protected),
        total_budget / (2.0 * n_unprotected),
    )


def make_agents(providers, config: AuctionConfig):
    """One bidding agent per provider, budgets by purchasing parity."""
    n_protected = sum(1 for p in providers if p.protected)
    n_unprotected = len(providers) - n_protected
    b_prot, b_unprot = allocate_budgets(
        config.total_budget, n_protected, n_unprotected
    )
    agents = []
    for p in providers:
        budget = b_prot if p.protected else b_unprot
        agents.append(ProviderAgent(p.id, budget, budget))
    return agents


def compute_bid(agent: ProviderAgent, best_quality, opportunities_remaining):
    """BALANCE-style bid: quality * remaining budget / future opportunities.

    Capped at the remaining budget.  Returns None (abstain) when the
    agent's budget is exhausted; callers also skip agents with no item
    in the pool.
    """
    if opportunities_remaining < 1:
        raise ValueError("opportunities_remaining must be >= 1")
    if agent.remaining_budget <= 0.0:
        return None
    bid = best_quality * agent.remaining_budget / opportunities_remaining
    if bid > agent.remaining_budget:
        bid = agent.remaining_budget
    return bid


def run_auction(bids, reserve):
    """Sealed second-price auction over a {provider_id: bid} map.

    The highest bid at or above the reserve wins (ties go to the lowest
    provider id) and pays the larger of the second-highest qualifying
    bid and the reserve.  Returns (winner, price) or None on no sale.
    """
    winner = None
    best = 0.0
    second = 0.0
    for provider_id in sorted(bids):
        bid = bids[provider_id]
        if bid < reserve:
            continue
        if winner is None or bid > best:
            if winner is not None and best > second:
                second = best
            winner, best = provider_id, bid
        elif bid > second or bid == best:
            second = bid
    if winner is None:
        return None
    price = second if second > reserve else reserve
    return winner, price


def fill_slate(slate, agents, item_provider, config: AuctionConfig, t):
    """Run this opportunity's slot auctions and assemble the final slate.

    For each of the k_auction slots, every agent owning at least one
    unplaced pool item (and solvent) bids on its best such item (highest
    quality, ties to the lowest item id); the number of future bid
    opportunities is r_hat = (horizon - t + 1) * k_auction - slots
    already auctioned this opportunity.  The winner's item is placed and
    the price leaves its budget.  No-sale slots and the remaining
    organic slots are filled from the incoming slate's ranking, skipping
    placed items.  Placement 'merged' orders the final slate by
    (base_score desc, item id asc); 'top' pins auction wins first in win
    order.  Agents are mutated in place; returns (slate, slot log).

    item_provider maps item id -> provider id (indexable).
    """
    k = len(slate.entries)
    log = []
    placed = []
    placed_ids = set()
    for slot in range(1, config.k_auction + 1):
        r_hat = (config.horizon - t + 1) * config.k_auction - (slot - 1)
        best_cand = {}
        for cand in slate.pool:
            if cand.item_id in placed_ids:
                continue
            provider = item_provider[cand.item_id]
            cur = best_cand.get(provider)
            if (
                cur is None
                or cand.quality > cur.quality
                or (cand.quality == cur.quality and cand.item_id < cur.item_id)
            ):
                best_cand[provider] = cand
        bids = {}
        for provider_id in sorted(best_cand):
            bid = compute_bid(agents[provider_id], best_cand[provider_id].quality, r_hat)
            if bid is not None:
                bids[provider_id] = bid
        sale = run_auction(bids, config.reserve_price)
        if sale is None:
            log.append(SlotAuction(t, slot, tuple(sorted(bids.items())), None, None, None))
            continue
        winner, price = sale
        agent = agents[winner]
        agent.remaining_budget -= price
        agent.spend += price
        agent.wins += 1
        item = best_cand[winner]
        placed.append(item)
        placed_ids.add(item.item_id)
        log.append(
            SlotAuction(t, slot, tuple(sorted(bids.items())), winner, price, item.item_id)
        )
    organic = []
    for cand in slate.entries:
        if len(placed) + len(organic) == k:
            break
        if cand.item_id in placed_ids:
            continue
        organic.append(cand)
    if config.placement == "top":
        entries = tuple(placed) + tuple(organic)
    else:
        entries = tuple(
            sorted(placed + organic, key=lambda c: (-c.base_score, c.item_id))
        )
    return type(slate)(slate.consumer_id, entries, slate.pool), log
