"""Stakeholder utility and fairness metrics.

Quantifies the three sides of the market: consumer accuracy (NDCG),
consumer-side outcome parity (statistical parity difference), provider
exposure (list diversity, catalog coverage, per-capita exposure parity,
Gini concentration), and a weighted system utility that aggregates
them.  Item and provider exposure share the DCG position discount so
consumer- and provider-side trade-offs stay commensurable.
"""

import math
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class UtilityWeights:
    """Non-negative weights for the system-utility aggregate."""

    w_consumer: float = 1.0
    w_parity: float = 1.0
    w_provider: float = 1.0

    def validate(self):
        if self.w_consumer < 0 or self.w_parity < 0 or self.w_provider < 0:
            raise ValueError("utility weights must be >= 0")


@dataclass(frozen=True)
class MetricsReport:
    """All scalar metrics for one run, plus the per-provider exposure table."""

    ndcg_mean: float
    spd: float
    protected_exposure_ratio: float
    catalog_coverage: float
    catalog_coverage_protected: float
    catalog_coverage_unprotected: float
    mean_list_diversity: float
    gini_exposure: float
    system_utility: float
    provider_exposure: tuple  # exposure indexed by provider id


def _discount(rank):
    """Position discount shared by NDCG and exposure: 1/log2(rank+1)."""
    return 1.0 / math.log2(rank + 1.0)


def ndcg_at_k(slate, test_items):
    """Binary-relevance NDCG of one slate against held-out test items.

    Gain is 1 for each slate item in the consumer's test set, discounted
    by position; the ideal places min(k, |test|) relevant items at the
    top.  Returns None for consumers with an empty test set (they carry
    no relevance signal and are excluded from the mean).
    """
    relevant = set(test_items)
    if not relevant:
        return None
    dcg = 0.0
    for rank, cand in enumerate(slate.entries, start=1):
        if cand.item_id in relevant:
            dcg += _discount(rank)
    n_ideal = min(len(slate.entries), len(relevant))
    idcg = 0.0
    for rank in range(1, n_ideal + 1):
        idcg += _discount(rank)
    return dcg / idcg


def _slate_mean_outcome(slate, outcomes):
    total = 0.0
    for cand in slate.entries:
        total += outcomes[cand.item_id]
    return total / len(slate.entries)


def statistical_parity_difference(slates, consumers, outcomes):
    """|mean slate outcome for protected consumers - mean for the rest|.

    Outcomes are already normalized to [0,1], so the result is too.
    Raises if either consumer group contributes no slate: the parity
    gap is undefined for a one-sided population.
    """
    protected = {c.id for c in consumers if c.protected}
    sums = {True: 0.0, False: 0.0}
    counts = {True: 0, False: 0}
    for slate in slates:
        group = slate.consumer_id in protected
        sums[group] += _slate_mean_outcome(slate, outcomes)
        counts[group] += 1
    if counts[True] == 0 or counts[False] == 0:
        raise ValueError(
            "statistical parity needs slates from both consumer groups"
        )
    return abs(sums[True] / counts[True] - sums[False] / counts[False])


def exposure(slates, item_provider, n_providers):
    """Per-provider exposure: position-discounted appearances, summed.

    An item shown at rank r contributes 1/log2(r+1) to its provider,
    accumulated over every slate, so exposure is additive across slate
    collections.
    """
    totals = [0.0] * n_providers
    for slate in slates:
        for rank, cand in enumerate(slate.entries, start=1):
            totals[item_provider[cand.item_id]] += _discount(rank)
    return totals


def protected_exposure_ratio(provider_exposure, provider_protected):
    """Per-capita exposure parity between provider classes, target 1.0.

    Compares mean exposure per protected provider against mean exposure
    per unprotected provider; aggregate totals would be meaningless when
    the classes differ greatly in size.  Both classes unexposed → 1.0
    (vacuous parity); only the unprotected class unexposed → inf.
    """
    p = sum(1 for flag in provider_protected if flag)
    q = len(provider_protected) - p
    if p == 0 or q == 0:
        raise ValueError(
            "exposure parity needs at least one provider in each class"
        )
    prot = 0.0
    unprot = 0.0
    for provider_id, value in enumerate(provider_exposure):
        if provider_protected[provider_id]:
            prot += value
        else:
            unprot += value
    if prot == 0.0 and unprot == 0.0:
        return 1.0
    if unprot == 0.0:
        return math.inf
    return (prot / p) / (unprot / q)


def catalog_coverage(provider_exposure, provider_protected):
    """Fraction of providers with at least one recommended item.

    Returns (overall, protected-class, unprotected-class) fractions.
    The class splits are the individual-fairness counterpart of list
    diversity: a system can fill every slate with protected items while
    still covering almost none of the protected providers.
    """
    covered = {True: 0, False: 0}
    totals = {True: 0, False: 0}
    for provider_id, value in enumerate(provider_exposure):
        group = bool(provider_protected[provider_id])
        totals[group] += 1
        if value > 0.0:
            covered[group] += 1
    overall = (covered[True] + covered[False]) / len(provider_exposure)
    per_class = {}
    for group in (True, False):
        per_class[group] = (
            covered[group] / totals[group] if totals[group] else 0.0
        )
    return overall, per_class[True], per_class[False]


def gini_exposure(provider_exposure):
    """Gini coefficient of the per-provider exposure vector.

    0.0 for perfectly equal exposure (including the all-zero vector),
    approaching 1.0 as exposure concentrates on a single provider.
    """
    values = sorted(provider_exposure)
    n = len(values)
    total = 0.0
    weighted = 0.0
    for i, value in enumerate(values, start=1):
        total += value
        weighted += i * value
    if total == 0.0:
        return 0.0
    return 2.0 * weighted / (n * total) - (n + 1.0) / n


def list_diversity(slate, item_protected):
    """Share of slate items whose provider is protected."""
    hits = sum(1 for cand in slate.entries if item_protected[cand.item_id])
    return hits / len(slate.entries)


def system_utility(report, weights=UtilityWeights()):
    """Weighted aggregate of the three stakeholder terms.

    w_consumer·ndcg_mean − w_parity·spd − w_provider·|1 − ratio|, with
    the exposure ratio clamped to [0,2] so runaway imbalance (including
    an infinite ratio) is penalized at most as heavily as total
    protected shut-out.
    """
    weights.validate()
    ratio = min(max(report.protected_exposure_ratio, 0.0), 2.0)
    return (
        weights.w_consumer * report.ndcg_mean
        - weights.w_parity * report.spd
        - weights.w_provider * abs(1.0 - ratio)
    )


def compute_report(slates, marketplace, weights=UtilityWeights()):
    """Assemble the full metrics report for one run's slates."""
    if not slates:
        raise ValueError("metrics need at least one slate")
    weights.validate()
    ndcgs = []
    for slate in slates:
        value = ndcg_at_k(slate, marketplace.test_by_consumer[slate.consumer_id])
        if value is not None:
            ndcgs.append(value)
    ndcg_mean = sum(ndcgs) / len(ndcgs) if ndcgs else 0.0
    spd = statistical_parity_difference(
        slates, marketplace.consumers, marketplace.outcomes
    )
    provider_protected = [p.protected for p in marketplace.providers]
    provider_exposure = exposure(
        slates, marketplace.item_provider, len(marketplace.providers)
    )
    ratio = protected_exposure_ratio(provider_exposure, provider_protected)
    coverage, coverage_prot, coverage_unprot = catalog_coverage(
        provider_exposure, provider_protected
    )
    item_protected = marketplace.item_protected
    diversity = sum(
        list_diversity(slate, item_protected) for slate in slates
    ) / len(slates)
    gini = gini_exposure(provider_exposure)
    partial = MetricsReport(
        ndcg_mean=ndcg_mean,
        spd=spd,
        protected_exposure_ratio=ratio,
        catalog_coverage=coverage,
        catalog_coverage_protected=coverage_prot,
        catalog_coverage_unprotected=coverage_unprot,
        mean_list_diversity=diversity,
        gini_exposure=gini,
        system_utility=0.0,
        provider_exposure=tuple(provider_exposure),
    )
    return replace(partial, system_utility=system_utility(partial, weights))
