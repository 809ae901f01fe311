"""Backend selection for the numeric kernels.

At import time the compiled extension (``fairmarket._kernels``) is
preferred; the pure-Python twin (``fairmarket._kernels_py``) is the
fallback.  Both produce bit-identical results, so the choice only
affects speed.  Set FAIRMARKET_BACKEND=python or =cython to force one
(forcing cython raises if the extension is not built).
"""

import os

_forced = os.environ.get("FAIRMARKET_BACKEND")

if _forced == "python":
    from fairmarket import _kernels_py as _impl

    BACKEND = "python"
elif _forced == "cython":
    from fairmarket import _kernels as _impl  # type: ignore[no-redef]

    BACKEND = "cython"
elif _forced:
    raise ImportError(f"unknown FAIRMARKET_BACKEND value: {_forced!r}")
else:
    try:
        from fairmarket import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        from fairmarket import _kernels_py as _impl

        BACKEND = "python"

splitmix64_next = _impl.splitmix64_next
uniform_block = _impl.uniform_block
normal_block = _impl.normal_block
interaction_sample = _impl.interaction_sample
similarity_csr = _impl.similarity_csr
accumulate_scores = _impl.accumulate_scores
top_n_by_score = _impl.top_n_by_score
