"""Scenario orchestration and serialization: decoupling identities,
output schemas, atomic writes, manifest structure, byte-for-byte
reproducibility, and a tiny end-to-end run checked against an
independent in-test reimplementation of the full pipeline."""

import json
import math
import os
import re
import statistics
from collections import Counter

import pytest

from _helpers import TINY_GENERATOR, make_config
from fairmarket.config import resolved_document
from fairmarket.experiment import (
    _SCALAR_METRICS,
    run_scenario,
    write_outputs,
)

SEEDS = (1, 2, 3)


def tiny_run(scenario, seeds=SEEDS, **sections):
    config = make_config(scenario, seeds, generator=TINY_GENERATOR, **sections)
    return run_scenario(config)


# --- decoupling identities ---------------------------------------------------


def test_neutral_decoupled_run_collapses_to_baseline():
    # With the parity pressure and the auctioned slots both switched off,
    # the decoupled scenario must reproduce the accuracy baseline
    # measurement for measurement.
    base_result, _ = tiny_run("baseline")
    cp_result, _ = tiny_run(
        "cp_decoupled", cfair={"lambda_c": 0.0}, auction={"k_auction": 0}
    )
    for base_seed, cp_seed in zip(
        base_result.seed_results, cp_result.seed_results
    ):
        assert cp_seed.report == base_seed.report
        assert [s.entries for s in cp_seed.slates] == \
            [s.entries for s in base_seed.slates]
        assert cp_seed.ledger.slots == []
        assert cp_seed.target_outcome is not None


def test_decoupled_consumer_side_matches_pure_cfair_without_auction():
    c_result, _ = tiny_run("c_fair")
    cp_result, _ = tiny_run("cp_decoupled", auction={"k_auction": 0})
    for c_seed, cp_seed in zip(c_result.seed_results, cp_result.seed_results):
        assert cp_seed.report.spd == c_seed.report.spd
        assert cp_seed.target_outcome == c_seed.target_outcome
        assert [s.entries for s in cp_seed.slates] == \
            [s.entries for s in c_seed.slates]


def test_decoupled_provider_side_matches_pure_auction_without_parity():
    a_result, _ = tiny_run("p_fair_auction")
    cp_result, _ = tiny_run("cp_decoupled", cfair={"lambda_c": 0.0})
    for a_seed, cp_seed in zip(a_result.seed_results, cp_result.seed_results):
        assert list(cp_seed.ledger.bid_rows()) == \
            list(a_seed.ledger.bid_rows())
        assert cp_seed.agents == a_seed.agents
        assert [s.entries for s in cp_seed.slates] == \
            [s.entries for s in a_seed.slates]


def test_unknown_scenario_raises():
    config = make_config("baseline", (1,), generator=TINY_GENERATOR)
    broken = config.__class__(**{**config.__dict__, "scenario": "mystery"})
    with pytest.raises(ValueError):
        run_scenario(broken)


# --- serialized outputs ------------------------------------------------------


BASE_FILES = {
    "metrics.csv",
    "provider_exposure.csv",
    "slates.csv",
    "run_manifest.json",
}


def test_output_file_sets_by_scenario(tmp_path):
    for scenario, expects_log in (
        ("baseline", False),
        ("p_fair_group", False),
        ("p_fair_auction", True),
        ("cp_decoupled", True),
    ):
        result, marketplaces = tiny_run(scenario, seeds=(1,))
        out = tmp_path / scenario
        write_outputs(result, marketplaces, str(out))
        expected = BASE_FILES | ({"auction_log.csv"} if expects_log else set())
        assert set(os.listdir(out)) == expected


def test_headers_and_shapes(tmp_path):
    result, marketplaces = tiny_run("p_fair_auction", seeds=(1, 2))
    write_outputs(result, marketplaces, str(tmp_path))

    metrics = (tmp_path / "metrics.csv").read_text().splitlines()
    assert metrics[0] == "scenario,seed," + ",".join(_SCALAR_METRICS)
    assert len(metrics) == 1 + 2  # one row per seed
    assert [row.split(",")[:2] for row in metrics[1:]] == \
        [["p_fair_auction", "1"], ["p_fair_auction", "2"]]

    exposure = (tmp_path / "provider_exposure.csv").read_text().splitlines()
    assert exposure[0] == "scenario,seed,provider_id,protected,exposure"
    assert len(exposure) == 1 + 2 * TINY_GENERATOR["n_providers"]

    slates = (tmp_path / "slates.csv").read_text().splitlines()
    assert slates[0] == \
        "scenario,seed,consumer_id,rank,item_id,provider_id,base_score"
    assert len(slates) == 1 + 2 * TINY_GENERATOR["n_consumers"] * 10
    first = slates[1].split(",")
    assert first[2] == "0" and first[3] == "1"  # consumer 0, rank 1

    log = (tmp_path / "auction_log.csv").read_text().splitlines()
    assert log[0] == "scenario,seed,t,slot,provider_id,bid,won,price,item_id"
    assert len(log) > 1
    # Exactly one winner per sold slot; losers have empty price/item.
    by_slot = Counter()
    for row in log[1:]:
        fields = row.split(",")
        assert fields[6] in ("0", "1")
        if fields[6] == "1":
            by_slot[(fields[1], fields[2], fields[3])] += 1
            assert fields[7] and fields[8]
        else:
            assert fields[7] == "" and fields[8] == ""
    assert all(count == 1 for count in by_slot.values())


def test_reals_are_six_decimal_fixed_point(tmp_path):
    result, marketplaces = tiny_run("baseline", seeds=(1,))
    write_outputs(result, marketplaces, str(tmp_path))
    pattern = re.compile(r"^-?\d+\.\d{6}$")
    for row in (tmp_path / "metrics.csv").read_text().splitlines()[1:]:
        for cell in row.split(",")[2:]:
            assert pattern.match(cell), cell
    for row in (tmp_path / "provider_exposure.csv").read_text().splitlines()[1:]:
        assert pattern.match(row.split(",")[4])
    for row in (tmp_path / "slates.csv").read_text().splitlines()[1:]:
        assert pattern.match(row.split(",")[6])


def test_outputs_use_lf_line_endings(tmp_path):
    result, marketplaces = tiny_run("baseline", seeds=(1,))
    write_outputs(result, marketplaces, str(tmp_path))
    for name in BASE_FILES:
        raw = (tmp_path / name).read_bytes()
        assert b"\r" not in raw
        assert raw.endswith(b"\n")


def test_overwrite_is_clean(tmp_path):
    result, marketplaces = tiny_run("baseline", seeds=(1,))
    write_outputs(result, marketplaces, str(tmp_path))
    before = {p: (tmp_path / p).read_bytes() for p in os.listdir(tmp_path)}
    write_outputs(result, marketplaces, str(tmp_path))
    after = {p: (tmp_path / p).read_bytes() for p in os.listdir(tmp_path)}
    assert before == after  # same names (no temp litter), same bytes


def test_manifest_structure(tmp_path):
    result, marketplaces = tiny_run("c_fair", seeds=(1, 2))
    write_outputs(result, marketplaces, str(tmp_path))
    text = (tmp_path / "run_manifest.json").read_text()
    document = json.loads(text)
    assert text == json.dumps(document, sort_keys=True, indent=2) + "\n"
    assert document["config"] == resolved_document(result.config)
    assert [entry["seed"] for entry in document["per_seed"]] == [1, 2]
    for entry in document["per_seed"]:
        assert entry["target_outcome"] is not None
        assert 0.0 <= entry["target_outcome"] <= 1.0
    aggregates = document["aggregates"]
    assert set(aggregates) == set(_SCALAR_METRICS)
    for stats in aggregates.values():
        assert set(stats) == {"mean", "std"}


def test_manifest_target_is_null_outside_consumer_scenarios(tmp_path):
    result, marketplaces = tiny_run("baseline", seeds=(1,))
    write_outputs(result, marketplaces, str(tmp_path))
    document = json.loads((tmp_path / "run_manifest.json").read_text())
    assert document["per_seed"][0]["target_outcome"] is None


def test_two_passes_are_byte_identical(tmp_path):
    dirs = []
    for name in ("a", "b"):
        result, marketplaces = run_scenario(
            make_config("cp_decoupled", (1, 2), generator=TINY_GENERATOR)
        )
        out = tmp_path / name
        write_outputs(result, marketplaces, str(out))
        dirs.append(out)
    names = sorted(os.listdir(dirs[0]))
    assert names == sorted(os.listdir(dirs[1]))
    for name in names:
        assert (dirs[0] / name).read_bytes() == (dirs[1] / name).read_bytes()


def test_aggregates_are_mean_and_sample_std():
    result, _ = tiny_run("baseline")
    aggregates = result.aggregates()
    for name in _SCALAR_METRICS:
        values = [getattr(r.report, name) for r in result.seed_results]
        mean, std = aggregates[name]
        assert mean == pytest.approx(statistics.fmean(values), abs=1e-15)
        assert std == pytest.approx(statistics.stdev(values), abs=1e-15)
    single, _ = tiny_run("baseline", seeds=(4,))
    assert all(std == 0.0 for _, std in single.aggregates().values())


# --- end-to-end golden: independent reimplementation -------------------------


def _oracle_similarity(train_sets, n_items):
    pop = Counter()
    for items in train_sets:
        pop.update(items)
    sim = {}
    for a in range(n_items):
        for b in range(n_items):
            if a == b:
                sim[a, b] = 1.0
                continue
            both = sum(1 for items in train_sets if a in items and b in items)
            if both:
                sim[a, b] = both / math.sqrt(pop[a] * pop[b])
    return sim


def _oracle_slate(consumer, train_sets, sim, n_items, k, n_pool):
    train = train_sets[consumer]
    scores = {
        i: sum(sim.get((i, j), 0.0) for j in train)
        for i in range(n_items)
        if i not in train
    }
    ranked = sorted(scores, key=lambda i: (-scores[i], i))[:n_pool]
    return ranked[:k], [scores[i] for i in ranked][:k]


def test_tiny_end_to_end_run_matches_independent_oracle():
    config = make_config(
        "baseline",
        seeds=(5,),
        generator={
            "n_consumers": 4,
            "n_providers": 2,
            "n_items": 8,
            "rho_c": 0.5,
            "rho_p": 0.5,
            "latent_dim": 2,
            "bias_beta": 2.0,
            "interactions_per_consumer": 5,
            "test_holdout": 0.2,
        },
        k=2,
        w=2,
    )
    result, marketplaces = run_scenario(config)
    marketplace = marketplaces[5]
    seed_result = result.seed_results[0]

    train_sets = [set(map(int, t)) for t in marketplace.train_by_consumer]
    test_sets = [set(map(int, t)) for t in marketplace.test_by_consumer]
    sim = _oracle_similarity(train_sets, 8)

    ndcgs = []
    group_sums = {True: 0.0, False: 0.0}
    group_counts = {True: 0, False: 0}
    exposure = [0.0, 0.0]
    for consumer in range(4):
        expected_items, expected_scores = _oracle_slate(
            consumer, train_sets, sim, 8, k=2, n_pool=4
        )
        slate = seed_result.slates[consumer]
        assert [c.item_id for c in slate.entries] == expected_items
        for cand, score in zip(slate.entries, expected_scores):
            assert cand.base_score == pytest.approx(score, abs=1e-12)

        dcg = sum(
            1.0 / math.log2(rank + 1.0)
            for rank, item in enumerate(expected_items, start=1)
            if item in test_sets[consumer]
        )
        n_ideal = min(2, len(test_sets[consumer]))
        if n_ideal:
            idcg = sum(
                1.0 / math.log2(r + 1.0) for r in range(1, n_ideal + 1)
            )
            ndcgs.append(dcg / idcg)

        mean_outcome = sum(
            marketplace.outcomes[i] for i in expected_items
        ) / 2.0
        protected = consumer < 2  # rho_c = 0.5 of 4 consumers
        group_sums[protected] += mean_outcome
        group_counts[protected] += 1

        for rank, item in enumerate(expected_items, start=1):
            exposure[item % 2] += 1.0 / math.log2(rank + 1.0)

    report = seed_result.report
    expected_ndcg = sum(ndcgs) / len(ndcgs) if ndcgs else 0.0
    assert report.ndcg_mean == pytest.approx(expected_ndcg, abs=1e-12)
    expected_spd = abs(
        group_sums[True] / group_counts[True]
        - group_sums[False] / group_counts[False]
    )
    assert report.spd == pytest.approx(expected_spd, abs=1e-12)
    assert report.provider_exposure == pytest.approx(exposure, abs=1e-12)
    expected_ratio = (exposure[0] / 1.0) / (exposure[1] / 1.0) \
        if exposure[1] else (1.0 if not exposure[0] else math.inf)
    assert report.protected_exposure_ratio == pytest.approx(
        expected_ratio, abs=1e-12
    )
    expected_utility = (
        report.ndcg_mean
        - report.spd
        - abs(1.0 - min(max(report.protected_exposure_ratio, 0.0), 2.0))
    )
    assert report.system_utility == pytest.approx(expected_utility, abs=1e-12)
