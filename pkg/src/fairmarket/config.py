"""Strict JSON experiment configuration.

Unknown keys are rejected and every error names the offending key path
(e.g. ``cfair.epsilon``): silent typos corrupt fairness experiments, so
nothing is ignored.  All defaults live in one table (`_DEFAULTS`), and
a minimal document needs only ``scenario`` and ``seeds``.

Two values are resolved rather than written: the slot-auction horizon
is the opportunity-stream length (one slate per consumer, so T =
n_consumers), and the group-fairness target share ``pfair.tau``
defaults to the protected provider fraction p/(p+q).  The C-fairness
outcome target is measured from each seed's baseline slates at run
time, so it has no configuration key at all.
"""

import json
import math
from dataclasses import dataclass, replace

from .auction import AuctionConfig
from .marketplace import GeneratorConfig
from .metrics import UtilityWeights
from .rerankers import CFairConfig, PFairGroupConfig

SCENARIOS = (
    "baseline",
    "c_fair",
    "p_fair_group",
    "p_fair_auction",
    "cp_decoupled",
)

_MAX_SEED = 2**64 - 1

# Every configurable key and its default, in one place.
_DEFAULTS = {
    "k": 10,
    "w": 5,
    "out": "out",
    "generator": {
        "n_consumers": 500,
        "n_providers": 50,
        "n_items": 1000,
        "rho_c": 0.5,
        "rho_p": 0.1,
        "latent_dim": 8,
        "bias_beta": 2.0,
        "interactions_per_consumer": 50,
        "test_holdout": 0.2,
    },
    "cfair": {"lambda_c": 0.5, "epsilon": 0.1},
    "pfair": {"lambda_p": 0.5, "tau": None},  # None -> p/(p+q)
    "auction": {
        "total_budget": 1000.0,
        "k_auction": 1,
        "reserve_price": 0.0,
        "placement": "merged",
    },
    "weights": {"w_consumer": 1.0, "w_parity": 1.0, "w_provider": 1.0},
}


class ConfigError(ValueError):
    """Configuration document is invalid; message names the key path."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved experiment: scenario, replication seeds, stages."""

    scenario: str
    seeds: tuple
    generator: GeneratorConfig  # seed field is replaced per replication
    k: int
    w: int
    cfair: CFairConfig  # target_outcome is replaced per replication
    pfair: PFairGroupConfig
    auction: AuctionConfig
    weights: UtilityWeights
    out_dir: str

    @property
    def n_pool(self):
        return self.w * self.k

    def validate(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(
                "scenario: must be one of " + ", ".join(SCENARIOS)
            )
        if not self.seeds:
            raise ConfigError("seeds: must be a non-empty list")
        if self.k < 1:
            raise ConfigError("k: must be >= 1")
        if self.w < 1:
            raise ConfigError("w: must be >= 1")
        _wrap(self.generator.validate, "generator")
        _wrap(self.cfair.validate, "cfair")
        _wrap(self.pfair.validate, "pfair")
        _wrap(lambda: self.auction.validate(k=self.k), "auction")
        _wrap(self.weights.validate, "weights")
        # Metrics compare consumer groups and provider classes, so every
        # scenario needs both sides of each split to be non-empty.
        n_prot_c = math.ceil(self.generator.rho_c * self.generator.n_consumers)
        if not 0 < n_prot_c < self.generator.n_consumers:
            raise ConfigError(
                "generator.rho_c: both consumer groups must be non-empty"
            )
        n_prot_p = math.ceil(self.generator.rho_p * self.generator.n_providers)
        if not 0 < n_prot_p < self.generator.n_providers:
            raise ConfigError(
                "generator.rho_p: both provider classes must be non-empty"
            )


def _wrap(validate, path):
    """Re-raise a sub-config validation error under its key path.

    Sub-config messages start with the offending field name, so the
    rewritten message reads as the dotted path ("cfair.epsilon must
    be ...").
    """
    try:
        validate()
    except ValueError as exc:
        message = str(exc)
        first = message.split(" ", 1)[0]
        if first.isidentifier():
            raise ConfigError(f"{path}.{message}") from exc
        raise ConfigError(f"{path}: {message}") from exc


def _expect_object(value, path):
    if not isinstance(value, dict):
        raise ConfigError(f"{path}: must be an object")
    return value


def _expect_int(value, path, minimum=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}: must be an integer")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{path}: must be >= {minimum}")
    return value


def _expect_real(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: must be a number")
    return float(value)


def _expect_str(value, path, choices=None):
    if not isinstance(value, str):
        raise ConfigError(f"{path}: must be a string")
    if choices is not None and value not in choices:
        raise ConfigError(f"{path}: must be one of " + ", ".join(choices))
    return value


def _take_section(document, name):
    """Pop section `name`, merge it over its defaults, reject unknowns."""
    defaults = _DEFAULTS[name]
    raw = document.pop(name, {})
    _expect_object(raw, name)
    unknown = set(raw) - set(defaults)
    if unknown:
        key = sorted(unknown)[0]
        raise ConfigError(f"{name}.{key}: unknown key")
    merged = dict(defaults)
    merged.update(raw)
    return merged


def _parse_seeds(value):
    if not isinstance(value, list) or not value:
        raise ConfigError("seeds: must be a non-empty list")
    seeds = []
    for i, seed in enumerate(value):
        seed = _expect_int(seed, f"seeds[{i}]", minimum=0)
        if seed > _MAX_SEED:
            raise ConfigError(f"seeds[{i}]: must fit in 64 bits")
        seeds.append(seed)
    return tuple(seeds)


def parse_config(text):
    """Parse a JSON experiment document into an ExperimentConfig.

    Raises ConfigError naming the offending key path on any unknown
    key, missing required field, or out-of-range value.
    """
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"document: not valid JSON ({exc})") from exc
    _expect_object(document, "document")

    if "scenario" not in document:
        raise ConfigError("scenario: required")
    scenario = _expect_str(document.pop("scenario"), "scenario", SCENARIOS)
    if "seeds" not in document:
        raise ConfigError("seeds: required")
    seeds = _parse_seeds(document.pop("seeds"))

    k = _expect_int(document.pop("k", _DEFAULTS["k"]), "k", minimum=1)
    w = _expect_int(document.pop("w", _DEFAULTS["w"]), "w", minimum=1)
    out_dir = _expect_str(document.pop("out", _DEFAULTS["out"]), "out")

    gen = _take_section(document, "generator")
    generator = GeneratorConfig(
        n_consumers=_expect_int(gen["n_consumers"], "generator.n_consumers"),
        n_providers=_expect_int(gen["n_providers"], "generator.n_providers"),
        n_items=_expect_int(gen["n_items"], "generator.n_items"),
        rho_c=_expect_real(gen["rho_c"], "generator.rho_c"),
        rho_p=_expect_real(gen["rho_p"], "generator.rho_p"),
        latent_dim=_expect_int(gen["latent_dim"], "generator.latent_dim"),
        bias_beta=_expect_real(gen["bias_beta"], "generator.bias_beta"),
        interactions_per_consumer=_expect_int(
            gen["interactions_per_consumer"],
            "generator.interactions_per_consumer",
        ),
        test_holdout=_expect_real(gen["test_holdout"], "generator.test_holdout"),
        seed=0,  # replaced per replication with each entry of `seeds`
    )

    cf = _take_section(document, "cfair")
    cfair = CFairConfig(
        lambda_c=_expect_real(cf["lambda_c"], "cfair.lambda_c"),
        epsilon=_expect_real(cf["epsilon"], "cfair.epsilon"),
        target_outcome=0.0,  # measured from baseline slates per seed
    )

    pf = _take_section(document, "pfair")
    tau = pf["tau"]
    if tau is None:
        n_prot = math.ceil(generator.rho_p * generator.n_providers)
        tau = n_prot / generator.n_providers
    else:
        tau = _expect_real(tau, "pfair.tau")
    pfair = PFairGroupConfig(
        lambda_p=_expect_real(pf["lambda_p"], "pfair.lambda_p"),
        tau=tau,
    )

    au = _take_section(document, "auction")
    auction = AuctionConfig(
        total_budget=_expect_real(au["total_budget"], "auction.total_budget"),
        k_auction=_expect_int(au["k_auction"], "auction.k_auction"),
        horizon=generator.n_consumers,  # one opportunity per consumer
        reserve_price=_expect_real(au["reserve_price"], "auction.reserve_price"),
        placement=_expect_str(
            au["placement"], "auction.placement", ("merged", "top")
        ),
    )

    wt = _take_section(document, "weights")
    weights = UtilityWeights(
        w_consumer=_expect_real(wt["w_consumer"], "weights.w_consumer"),
        w_parity=_expect_real(wt["w_parity"], "weights.w_parity"),
        w_provider=_expect_real(wt["w_provider"], "weights.w_provider"),
    )

    if document:
        key = sorted(document)[0]
        raise ConfigError(f"{key}: unknown key")

    config = ExperimentConfig(
        scenario=scenario,
        seeds=seeds,
        generator=generator,
        k=k,
        w=w,
        cfair=cfair,
        pfair=pfair,
        auction=auction,
        weights=weights,
        out_dir=out_dir,
    )
    config.validate()
    return config


def with_seeds(config, seeds):
    """Copy of `config` with the replication seed list replaced."""
    seeds = _parse_seeds(list(seeds))
    return replace(config, seeds=seeds)


def resolved_document(config):
    """The fully resolved config as a plain dict (for the run manifest)."""
    return {
        "scenario": config.scenario,
        "seeds": list(config.seeds),
        "k": config.k,
        "w": config.w,
        "out": config.out_dir,
        "generator": {
            "n_consumers": config.generator.n_consumers,
            "n_providers": config.generator.n_providers,
            "n_items": config.generator.n_items,
            "rho_c": config.generator.rho_c,
            "rho_p": config.generator.rho_p,
            "latent_dim": config.generator.latent_dim,
            "bias_beta": config.generator.bias_beta,
            "interactions_per_consumer": config.generator.interactions_per_consumer,
            "test_holdout": config.generator.test_holdout,
        },
        "cfair": {
            "lambda_c": config.cfair.lambda_c,
            "epsilon": config.cfair.epsilon,
        },
        "pfair": {"lambda_p": config.pfair.lambda_p, "tau": config.pfair.tau},
        "auction": {
            "total_budget": config.auction.total_budget,
            "k_auction": config.auction.k_auction,
            "horizon": config.auction.horizon,
            "reserve_price": config.auction.reserve_price,
            "placement": config.auction.placement,
        },
        "weights": {
            "w_consumer": config.weights.w_consumer,
            "w_parity": config.weights.w_parity,
            "w_provider": config.weights.w_provider,
        },
    }
