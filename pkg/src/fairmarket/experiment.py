"""Scenario orchestration, replication over seeds, and serialized outputs.

Five scenarios cover the fairness design space: ``baseline`` (accuracy
ranking only), ``c_fair`` (consumer-side outcome-parity re-ranking),
``p_fair_group`` (provider-side slate-composition re-ranking),
``p_fair_auction`` (individual provider fairness via the budgeted slot
market), and ``cp_decoupled`` (the C-fair ranking passed on to the
bidding mechanism — both sides active, neither aware of the other).

The opportunity stream is one slate per consumer in ascending consumer
id order, so the auction horizon T is known in advance (T =
n_consumers).  Every stage is deterministic given (config, seed):
two runs of the same config produce byte-identical outputs.
"""

import io
import json
import math
import os
import statistics
from dataclasses import dataclass, replace

from ._io import atomic_write_text
from .auction import AuctionLedger, fill_slate, make_agents
from .marketplace import generate
from .metrics import MetricsReport, compute_report
from .recommender import build_slate, item_similarity
from .rerankers import (
    GroupState,
    rerank_cfair,
    rerank_pfair_group,
    slate_outcome,
)

_SCALAR_METRICS = (
    "ndcg_mean",
    "spd",
    "protected_exposure_ratio",
    "catalog_coverage",
    "catalog_coverage_protected",
    "catalog_coverage_unprotected",
    "mean_list_diversity",
    "gini_exposure",
    "system_utility",
)


@dataclass(frozen=True)
class SeedResult:
    """Everything one replication produced."""

    seed: int
    report: MetricsReport
    slates: tuple  # final served slates, ascending consumer id
    ledger: AuctionLedger | None  # auction scenarios only
    agents: tuple | None  # final provider budget accounts, by provider id
    target_outcome: float | None  # measured parity target (C-fair stages)


@dataclass(frozen=True)
class RunResult:
    """Per-seed results plus across-seed aggregates."""

    config: object
    seed_results: tuple

    def aggregates(self):
        """Across-seed mean and sample standard deviation per metric."""
        out = {}
        for name in _SCALAR_METRICS:
            values = [
                getattr(r.report, name) for r in self.seed_results
            ]
            mean = statistics.fmean(values)
            std = statistics.stdev(values) if len(values) > 1 else 0.0
            out[name] = (mean, std)
        return out


def baseline_target_outcome(base_slates, outcomes):
    """The consumer-parity target: mean baseline slate outcome.

    Averaging the accuracy ranking's own slate outcomes over all
    consumers anchors the parity target to what the system already
    delivers, so the re-ranker equalizes groups around it instead of
    chasing an arbitrary level.
    """
    total = 0.0
    for slate in base_slates:
        total += slate_outcome(slate, outcomes)
    return total / len(base_slates)


def run_seed(config, seed):
    """Run one replication: generate, rank, apply the scenario, measure."""
    marketplace = generate(replace(config.generator, seed=seed))
    similarity = item_similarity(marketplace)
    base_slates = [
        build_slate(consumer.id, marketplace, similarity, config.k, config.n_pool)
        for consumer in marketplace.consumers
    ]
    outcomes = marketplace.outcomes
    scenario = config.scenario
    ledger = None
    agents = None
    target = None

    if scenario == "baseline":
        final = base_slates
    elif scenario == "c_fair":
        target = baseline_target_outcome(base_slates, outcomes)
        cfair = replace(config.cfair, target_outcome=target)
        state = GroupState()
        final = []
        for slate in base_slates:
            consumer = marketplace.consumers[slate.consumer_id]
            served, state = rerank_cfair(slate, consumer, cfair, state, outcomes)
            final.append(served)
    elif scenario == "p_fair_group":
        item_protected = marketplace.item_protected
        final = [
            rerank_pfair_group(slate, config.pfair, item_protected)
            for slate in base_slates
        ]
    elif scenario == "p_fair_auction":
        agents = make_agents(marketplace.providers, config.auction)
        ledger = AuctionLedger()
        final = []
        for t, slate in enumerate(base_slates, start=1):
            served, log = fill_slate(
                slate, agents, marketplace.item_provider, config.auction, t
            )
            ledger.extend(log)
            final.append(served)
    elif scenario == "cp_decoupled":
        target = baseline_target_outcome(base_slates, outcomes)
        cfair = replace(config.cfair, target_outcome=target)
        state = GroupState()
        agents = make_agents(marketplace.providers, config.auction)
        ledger = AuctionLedger()
        final = []
        for t, slate in enumerate(base_slates, start=1):
            consumer = marketplace.consumers[slate.consumer_id]
            fair, state = rerank_cfair(slate, consumer, cfair, state, outcomes)
            served, log = fill_slate(
                fair, agents, marketplace.item_provider, config.auction, t
            )
            ledger.extend(log)
            final.append(served)
    else:
        raise ValueError(f"unknown scenario: {scenario}")

    report = compute_report(final, marketplace, config.weights)
    return SeedResult(
        seed=seed,
        report=report,
        slates=tuple(final),
        ledger=ledger,
        agents=tuple(agents) if agents is not None else None,
        target_outcome=target,
    ), marketplace


def run_scenario(config):
    """Run every seed of the configured scenario.

    Returns (RunResult, marketplaces) where marketplaces maps seed to
    the generated marketplace (needed to serialize provider columns).
    """
    config.validate()
    seed_results = []
    marketplaces = {}
    for seed in config.seeds:
        result, marketplace = run_seed(config, seed)
        seed_results.append(result)
        marketplaces[seed] = marketplace
    return RunResult(config=config, seed_results=tuple(seed_results)), marketplaces


def _real(value):
    """CSV real formatting: six decimals (inf prints as 'inf')."""
    return f"{value:.6f}"


def _csv_text(header, rows):
    buffer = io.StringIO()
    buffer.write(",".join(header) + "\n")
    for row in rows:
        buffer.write(",".join(row) + "\n")
    return buffer.getvalue()


def _metrics_rows(result):
    scenario = result.config.scenario
    for seed_result in result.seed_results:
        report = seed_result.report
        row = [scenario, str(seed_result.seed)]
        row.extend(_real(getattr(report, name)) for name in _SCALAR_METRICS)
        yield row


def _exposure_rows(result, marketplaces):
    scenario = result.config.scenario
    for seed_result in result.seed_results:
        providers = marketplaces[seed_result.seed].providers
        for provider in providers:
            yield [
                scenario,
                str(seed_result.seed),
                str(provider.id),
                str(int(provider.protected)),
                _real(seed_result.report.provider_exposure[provider.id]),
            ]


def _slate_rows(result, marketplaces):
    scenario = result.config.scenario
    for seed_result in result.seed_results:
        item_provider = marketplaces[seed_result.seed].item_provider
        for slate in seed_result.slates:
            for rank, cand in enumerate(slate.entries, start=1):
                yield [
                    scenario,
                    str(seed_result.seed),
                    str(slate.consumer_id),
                    str(rank),
                    str(cand.item_id),
                    str(item_provider[cand.item_id]),
                    _real(cand.base_score),
                ]


def _auction_rows(result):
    scenario = result.config.scenario
    for seed_result in result.seed_results:
        if seed_result.ledger is None:
            continue
        for t, slot, provider_id, bid, won, price, item_id in (
            seed_result.ledger.bid_rows()
        ):
            yield [
                scenario,
                str(seed_result.seed),
                str(t),
                str(slot),
                str(provider_id),
                _real(bid),
                str(won),
                _real(price) if price is not None else "",
                str(item_id) if item_id is not None else "",
            ]


def _manifest_real(value):
    """JSON-safe real: six-decimal rounding, non-finite as strings."""
    if value is None:
        return None
    if not math.isfinite(value):
        return repr(value)
    return round(value, 6)


def _manifest_text(result):
    from .config import resolved_document

    aggregates = {
        name: {"mean": _manifest_real(mean), "std": _manifest_real(std)}
        for name, (mean, std) in result.aggregates().items()
    }
    per_seed = [
        {
            "seed": seed_result.seed,
            "target_outcome": _manifest_real(seed_result.target_outcome),
        }
        for seed_result in result.seed_results
    ]
    document = {
        "config": resolved_document(result.config),
        "aggregates": aggregates,
        "per_seed": per_seed,
    }
    return json.dumps(document, sort_keys=True, indent=2) + "\n"


def write_outputs(result, marketplaces, out_dir):
    """Serialize a run: CSV tables plus the resolved-config manifest.

    All files are written atomically (temp file, then rename) with LF
    endings and six-decimal reals.  auction_log.csv appears only for
    auction scenarios.
    """
    os.makedirs(out_dir, exist_ok=True)
    atomic_write_text(
        os.path.join(out_dir, "metrics.csv"),
        _csv_text(
            ("scenario", "seed") + _SCALAR_METRICS,
            _metrics_rows(result),
        ),
    )
    atomic_write_text(
        os.path.join(out_dir, "provider_exposure.csv"),
        _csv_text(
            ("scenario", "seed", "provider_id", "protected", "exposure"),
            _exposure_rows(result, marketplaces),
        ),
    )
    atomic_write_text(
        os.path.join(out_dir, "slates.csv"),
        _csv_text(
            (
                "scenario",
                "seed",
                "consumer_id",
                "rank",
                "item_id",
                "provider_id",
                "base_score",
            ),
            _slate_rows(result, marketplaces),
        ),
    )
    if result.config.scenario in ("p_fair_auction", "cp_decoupled"):
        atomic_write_text(
            os.path.join(out_dir, "auction_log.csv"),
            _csv_text(
                (
                    "scenario",
                    "seed",
                    "t",
                    "slot",
                    "provider_id",
                    "bid",
                    "won",
                    "price",
                    "item_id",
                ),
                _auction_rows(result),
            ),
        )
    atomic_write_text(
        os.path.join(out_dir, "run_manifest.json"), _manifest_text(result)
    )
