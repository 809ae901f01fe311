"""Session-wide fixtures: cached full-size scenario runs shared across
test modules so expensive sweeps are computed once."""

import json

import pytest

from _helpers import make_desk_config
from fairmarket.experiment import run_scenario

DESK_SEEDS = tuple(range(1, 11))


class RunCache:
    """Memoized run_scenario calls keyed by (scenario, seeds, overrides)."""

    def __init__(self):
        self._runs = {}

    def run(self, scenario, seeds=DESK_SEEDS, **sections):
        key = (scenario, tuple(seeds), json.dumps(sections, sort_keys=True))
        if key not in self._runs:
            config = make_desk_config(scenario, seeds, **sections)
            self._runs[key] = run_scenario(config)
        return self._runs[key]


@pytest.fixture(scope="session")
def desk_runs():
    return RunCache()
