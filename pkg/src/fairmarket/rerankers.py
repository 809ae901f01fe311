"""Score-level fairness re-ranking.

Two interventions over the baseline slate, both reselecting slate
membership from the candidate pool with the result re-sorted by base
score for presentation (fairness governs what is in the slate, not its
internal order):

* consumer-side outcome parity: steer each consumer group's running
  mean slate outcome toward a global target via an additive per-item
  parity value, under a hard bounded rank-quality loss;
* group provider-side diversity: greedy interpolation of candidate
  quality with a protected-share coverage gain.
"""

from dataclasses import dataclass
from math import log2

from fairmarket.recommender import Slate


@dataclass(frozen=True)
class CFairConfig:
    lambda_c: float  # parity pressure, >= 0
    epsilon: float  # max allowed per-slate rank-quality loss, in [0, 1)
    target_outcome: float  # global target mean slate outcome

    def validate(self):
        if self.lambda_c < 0.0:
            raise ValueError("lambda_c must be >= 0")
        if not 0.0 <= self.epsilon < 1.0:
            raise ValueError("epsilon must be in [0, 1)")
        if not 0.0 <= self.target_outcome <= 1.0:
            raise ValueError("target_outcome must be in [0, 1]")


@dataclass(frozen=True)
class PFairGroupConfig:
    lambda_p: float  # interpolation weight in [0, 1]
    tau: float  # target protected-provider share per slate, in [0, 1]

    def validate(self):
        if not 0.0 <= self.lambda_p <= 1.0:
            raise ValueError("lambda_p must be in [0, 1]")
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError("tau must be in [0, 1]")


class GroupState:
    """Running mean of served slate outcomes per consumer group.

    One observation per served slate (the slate's mean item outcome).
    Slates must be fed in a fixed consumer order; the experiment runner
    uses ascending consumer id.
    """

    def __init__(self):
        self.mean = {True: 0.0, False: 0.0}  # keyed by protected flag
        self.count = {True: 0, False: 0}

    def observe(self, protected, slate_outcome):
        n = self.count[protected]
        self.mean[protected] = (self.mean[protected] * n + slate_outcome) / (n + 1)
        self.count[protected] = n + 1


def _presentation(consumer_id, chosen, pool):
    entries = tuple(
        sorted(chosen, key=lambda cand: (-cand.base_score, cand.item_id))
    )
    return Slate(consumer_id=consumer_id, entries=entries, pool=pool)


def slate_outcome(slate, outcomes):
    """Mean outcome of the slate's entries."""
    total = 0.0
    for cand in slate.entries:
        total += outcomes[cand.item_id]
    return total / len(slate.entries)


def rank_quality(reranked: Slate, base: Slate) -> float:
    """DCG of the reranked entries over DCG of the base entries.

    Gains are base scores, discount 1/log2(rank+1) with ranks from 1.
    Both slates must come from the same pool; an all-zero base DCG
    returns 1.0 by convention.
    """
    dcg_r = 0.0
    for rank, cand in enumerate(reranked.entries, start=1):
        dcg_r += cand.base_score / log2(rank + 1)
    dcg_b = 0.0
    for rank, cand in enumerate(base.entries, start=1):
        dcg_b += cand.base_score / log2(rank + 1)
    if dcg_b == 0.0:
        return 1.0
    return dcg_r / dcg_b


def _select_outcome_parity(pool, k, lam, mean, count, dev_now, target,
                           outcomes):
    """Top-k pool items by parity value quality(i) + lam * gain(i).

    gain(i) is the deviation drop of the group's running mean if item
    i's outcome were appended as the next observation:
    |mean - target| - |updated-with-i - target|.  The value is a fixed
    per-item quantity, so the additive k-subset objective is maximized
    exactly by taking the k best.  Value ties break by higher base
    score, then lower item id, so zero pressure reproduces the base
    slate exactly.
    """

    def value(cand):
        updated = (mean * count + outcomes[cand.item_id]) / (count + 1)
        return cand.quality + lam * (dev_now - abs(updated - target))

    ranked = sorted(
        pool, key=lambda cand: (-value(cand), -cand.base_score, cand.item_id)
    )
    return ranked[:k]


def rerank_cfair(slate, consumer, config: CFairConfig, state: GroupState,
                 outcomes):
    """Outcome-parity re-ranking with a hard rank-quality floor.

    Reselects the k pool items with the best parity values as
    documented in _select_outcome_parity; if the result's rank_quality
    drops below 1 - epsilon the pressure is halved and selection
    repeats (20 halvings max, then the base slate is served).  The
    served slate's mean outcome updates the consumer group's running
    mean.  Returns (slate, state); state is updated in place.
    """
    k = len(slate.entries)
    group = consumer.protected
    count = state.count[group]
    mean = state.mean[group]
    dev_now = abs(mean - config.target_outcome) if count > 0 else 0.0

    served = slate
    lam = config.lambda_c
    for _ in range(21):
        chosen = _select_outcome_parity(
            slate.pool, k, lam, mean, count, dev_now,
            config.target_outcome, outcomes,
        )
        candidate = _presentation(slate.consumer_id, chosen, slate.pool)
        if rank_quality(candidate, slate) >= 1.0 - config.epsilon:
            served = candidate
            break
        lam = lam / 2.0
    state.observe(group, slate_outcome(served, outcomes))
    return served, state


def rerank_pfair_group(slate, config: PFairGroupConfig, item_protected):
    """Diversity-style re-ranking toward a protected-provider share.

    Greedy over the pool maximizing
    (1 - lambda_p) * quality(i) + lambda_p * coverage_gain(i), where a
    protected-provider candidate gains max(0, tau - protected share of
    the partial slate) and others gain 0 (the empty partial slate has
    share 0).  Value ties break by higher base score, then lower item
    id, so zero pressure reproduces the base slate exactly.
    """
    k = len(slate.entries)
    lam = config.lambda_p
    chosen = []
    remaining = list(slate.pool)
    n_protected = 0
    for step in range(k):
        share = n_protected / step if step > 0 else 0.0
        open_gain = config.tau - share
        if open_gain < 0.0:
            open_gain = 0.0
        best_idx = -1
        best_value = 0.0
        for idx, cand in enumerate(remaining):
            gain = open_gain if item_protected[cand.item_id] else 0.0
            value = (1.0 - lam) * cand.quality + lam * gain
            if best_idx >= 0:
                best = remaining[best_idx]
                better = value > best_value or (
                    value == best_value
                    and (cand.base_score, -cand.item_id)
                    > (best.base_score, -best.item_id)
                )
            else:
                better = True
            if better:
                best_idx = idx
                best_value = value
        cand = remaining.pop(best_idx)
        chosen.append(cand)
        if item_protected[cand.item_id]:
            n_protected += 1
    return _presentation(slate.consumer_id, chosen, slate.pool)
