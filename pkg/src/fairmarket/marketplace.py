"""Domain types and the seeded synthetic marketplace generator.

The generator produces a small multisided marketplace in which the
unprotected consumer group clicks with a bias toward high-outcome items
while the protected group does not, creating the disparity the fairness
interventions are meant to correct.

Everything is a pure function of the config (seed included).  The
splitmix64 stream is consumed in a fixed, documented order so two runs,
or two backend implementations, produce byte-identical marketplaces.
"""

import math
import os
from array import array
from dataclasses import dataclass, field
from functools import cached_property

from fairmarket import kernels
from fairmarket._io import atomic_write_text


@dataclass(frozen=True)
class Consumer:
    id: int
    protected: bool


@dataclass(frozen=True)
class Provider:
    id: int
    protected: bool


@dataclass(frozen=True)
class Item:
    id: int
    provider_id: int
    outcome: float  # normalized outcome variable in [0, 1]


@dataclass(frozen=True)
class GeneratorConfig:
    """Knobs for the synthetic marketplace.

    bias_beta is the strength of the outcome-correlated click bias and
    applies to unprotected consumers only; protected consumers sample
    purely by latent-taste affinity.
    """

    n_consumers: int = 500
    n_providers: int = 50
    n_items: int = 1000
    rho_c: float = 0.5
    rho_p: float = 0.1
    latent_dim: int = 8
    bias_beta: float = 2.0
    interactions_per_consumer: int = 50
    test_holdout: float = 0.2
    seed: int = 0

    def validate(self):
        if self.n_consumers < 1 or self.n_providers < 1 or self.n_items < 1:
            raise ValueError("entity counts must be >= 1")
        if not 0.0 <= self.rho_c <= 1.0:
            raise ValueError("rho_c must be in [0, 1]")
        if not 0.0 <= self.rho_p <= 1.0:
            raise ValueError("rho_p must be in [0, 1]")
        if self.latent_dim < 1:
            raise ValueError("latent_dim must be >= 1")
        if self.bias_beta < 0.0:
            raise ValueError("bias_beta must be >= 0")
        if self.interactions_per_consumer < 1:
            raise ValueError("interactions_per_consumer must be >= 1")
        if self.interactions_per_consumer > self.n_items:
            raise ValueError(
                "interactions_per_consumer cannot exceed n_items "
                "(sampling is without replacement)"
            )
        if not 0.0 < self.test_holdout < 1.0:
            raise ValueError("test_holdout must be in (0, 1)")
        if not 0 <= self.seed < 1 << 64:
            raise ValueError("seed must fit in 64 unsigned bits")


@dataclass
class Marketplace:
    """Generated marketplace: entities plus train/test implicit positives.

    train_by_consumer / test_by_consumer hold each consumer's item ids as
    ascending array('q'); the pairwise-set views are derived from them.
    """

    config: GeneratorConfig
    consumers: list
    providers: list
    items: list
    train_by_consumer: list
    test_by_consumer: list
    outcomes: array = field(repr=False, default=None)  # outcome by item id
    item_provider: array = field(repr=False, default=None)

    @cached_property
    def train_interactions(self):
        return {
            (c, int(i))
            for c, items in enumerate(self.train_by_consumer)
            for i in items
        }

    @cached_property
    def test_interactions(self):
        return {
            (c, int(i))
            for c, items in enumerate(self.test_by_consumer)
            for i in items
        }

    @cached_property
    def item_protected(self):
        """Item id -> provider-protected flag."""
        prot = [self.providers[p].protected for p in self.item_provider]
        return prot

    def n_protected_providers(self):
        return sum(1 for p in self.providers if p.protected)


def generate(config: GeneratorConfig) -> Marketplace:
    """Build a marketplace deterministically from the config.

    Stream-consumption order (one splitmix64 stream seeded by
    config.seed):

    1. consumer latent vectors: n_consumers * latent_dim normals,
       row-major;
    2. item latent vectors: n_items * latent_dim normals, row-major;
    3. item outcomes: n_items uniforms;
    4. per consumer in ascending id order: interactions_per_consumer
       weighted draws without replacement (one uniform each), then
       floor(test_holdout * interactions_per_consumer) holdout draws
       (one uniform each) removing positions from the draw-order list.

    The first ceil(rho_c * n_consumers) consumers and the first
    ceil(rho_p * n_providers) providers are protected; items go to
    providers round-robin (item i -> provider i mod n_providers).
    """
    config.validate()
    n_c, n_p, n_i = config.n_consumers, config.n_providers, config.n_items
    d = config.latent_dim

    n_prot_c = math.ceil(config.rho_c * n_c)
    n_prot_p = math.ceil(config.rho_p * n_p)
    consumers = [Consumer(c, c < n_prot_c) for c in range(n_c)]
    providers = [Provider(p, p < n_prot_p) for p in range(n_p)]

    state = config.seed
    state, cons_vecs = kernels.normal_block(state, n_c * d)
    state, item_vecs = kernels.normal_block(state, n_i * d)
    state, outcomes = kernels.uniform_block(state, n_i)

    item_provider = array("q", (i % n_p for i in range(n_i)))
    items = [Item(i, i % n_p, outcomes[i]) for i in range(n_i)]

    m = config.interactions_per_consumer
    n_test = int(config.test_holdout * m)
    train_by_consumer = []
    test_by_consumer = []
    for c in range(n_c):
        beta_eff = 0.0 if consumers[c].protected else config.bias_beta
        u_vec = cons_vecs[c * d:(c + 1) * d]
        state, picks = kernels.interaction_sample(
            state, u_vec, item_vecs, d, beta_eff, outcomes, m
        )
        working = list(picks)  # draw order
        held = []
        if n_test > 0:
            state, draws = kernels.uniform_block(state, n_test)
            for u in draws:
                idx = int(u * len(working))
                if idx >= len(working):  # float edge at u ~ 1
                    idx = len(working) - 1
                held.append(working.pop(idx))
        train_by_consumer.append(array("q", sorted(working)))
        test_by_consumer.append(array("q", sorted(held)))

    return Marketplace(
        config=config,
        consumers=consumers,
        providers=providers,
        items=items,
        train_by_consumer=train_by_consumer,
        test_by_consumer=test_by_consumer,
        outcomes=outcomes,
        item_provider=item_provider,
    )


def export_csv(marketplace: Marketplace, out_dir):
    """Write consumers.csv, items.csv and interactions.csv to out_dir.

    Headers included, LF line endings, ids as decimal integers, reals
    with 6 decimals.  interactions.csv rows are ordered by
    (consumer_id, item_id) with split in {train, test}.
    """
    lines = ["id,protected"]
    for c in marketplace.consumers:
        lines.append(f"{c.id},{int(c.protected)}")
    atomic_write_text(os.path.join(out_dir, "consumers.csv"), "\n".join(lines) + "\n")

    lines = ["id,provider_id,outcome"]
    for it in marketplace.items:
        lines.append(f"{it.id},{it.provider_id},{it.outcome:.6f}")
    atomic_write_text(os.path.join(out_dir, "items.csv"), "\n".join(lines) + "\n")

    lines = ["consumer_id,item_id,split"]
    for c in range(len(marketplace.consumers)):
        rows = [(int(i), "train") for i in marketplace.train_by_consumer[c]]
        rows += [(int(i), "test") for i in marketplace.test_by_consumer[c]]
        rows.sort()
        for item_id, split in rows:
            lines.append(f"{c},{item_id},{split}")
    atomic_write_text(
        os.path.join(out_dir, "interactions.csv"), "\n".join(lines) + "\n"
    )
