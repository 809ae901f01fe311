"""Shared builders for tests: configs through the real JSON parser and
hand-built marketplaces/slates for oracle checks."""

import json

from fairmarket.config import parse_config
from fairmarket.marketplace import Consumer, GeneratorConfig, Item, Marketplace, Provider
from fairmarket.recommender import ScoredCandidate, Slate
from array import array

# Small sizes keep unit-test property loops fast; the acceptance module
# runs the full-size defaults.
SMALL_GENERATOR = {
    "n_consumers": 80,
    "n_providers": 20,
    "n_items": 200,
    "rho_c": 0.5,
    "rho_p": 0.1,
    "latent_dim": 4,
    "bias_beta": 2.0,
    "interactions_per_consumer": 20,
    "test_holdout": 0.2,
}

TINY_GENERATOR = {
    "n_consumers": 40,
    "n_providers": 10,
    "n_items": 100,
    "rho_c": 0.5,
    "rho_p": 0.2,
    "latent_dim": 3,
    "bias_beta": 2.0,
    "interactions_per_consumer": 10,
    "test_holdout": 0.2,
}


def config_doc(scenario="baseline", seeds=(7,), generator=SMALL_GENERATOR,
               **sections):
    """A JSON config document as a dict, small generator by default."""
    doc = {"scenario": scenario, "seeds": list(seeds)}
    if generator is not None:
        doc["generator"] = dict(generator)
    doc.update(sections)
    return doc


def make_config(scenario="baseline", seeds=(7,), generator=SMALL_GENERATOR,
                **sections):
    """Build an ExperimentConfig through the real JSON parser."""
    return parse_config(json.dumps(config_doc(scenario, seeds, generator,
                                              **sections)))


def make_desk_config(scenario="baseline", seeds=(7,), **sections):
    """Full-size defaults: only scenario and seeds written explicitly."""
    return parse_config(json.dumps(config_doc(scenario, seeds, generator=None,
                                              **sections)))


def cand(item_id, base_score, quality):
    return ScoredCandidate(item_id=item_id, base_score=base_score,
                           quality=quality)


def hand_slate(candidates, k, consumer_id=0):
    """Slate from hand-built candidates: pool ordered by (score desc, id),
    entries = first k."""
    pool = tuple(sorted(candidates,
                        key=lambda c: (-c.base_score, c.item_id)))
    return Slate(consumer_id=consumer_id, entries=pool[:k], pool=pool)


def hand_marketplace(n_consumers, consumer_protected, n_providers,
                     provider_protected, item_provider, outcomes,
                     train=None, test=None):
    """Minimal marketplace for metric oracles; train/test default empty."""
    n_items = len(item_provider)
    empty = [array("q") for _ in range(n_consumers)]
    return Marketplace(
        config=GeneratorConfig(n_consumers=n_consumers,
                               n_providers=n_providers, n_items=n_items),
        consumers=[Consumer(c, c in consumer_protected)
                   for c in range(n_consumers)],
        providers=[Provider(p, p in provider_protected)
                   for p in range(n_providers)],
        items=[Item(i, item_provider[i], outcomes[i])
               for i in range(n_items)],
        train_by_consumer=train if train is not None else empty,
        test_by_consumer=test if test is not None else
        [array("q") for _ in range(n_consumers)],
        outcomes=array("d", outcomes),
        item_provider=array("q", item_provider),
    )
