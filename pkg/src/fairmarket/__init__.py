"""Multisided-fairness recommendation marketplace simulator.

A deterministic testbed for fairness-aware recommendation in a
multistakeholder market: a synthetic marketplace generator with
protected consumer and provider classes, an item-based collaborative
recommender, consumer-side (outcome parity) and provider-side (slate
composition) re-rankers, a budgeted second-price slot auction for
individual provider fairness, stakeholder metrics, and a scenario
runner with replication over seeds.

The numeric core runs on a compiled extension when available and falls
back to a pure-Python implementation otherwise; both backends produce
bit-identical results.  Set FAIRMARKET_BACKEND=python|cython to force
one explicitly.
"""

__version__ = "0.1.0"

from .kernels import BACKEND

__all__ = ["BACKEND", "__version__"]
