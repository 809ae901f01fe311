"""Deterministic random stream built on splitmix64.

The whole simulator consumes one splitmix64 sequence per marketplace.
State is a plain unsigned 64-bit integer, so any language can reproduce
the stream bit for bit.  Derived draws are fully specified:

* ``uniform``: one splitmix64 output x mapped to ``(x >> 11) * 2**-53``,
  a double in [0, 1).
* ``normals``: Box-Muller over consecutive uniform pairs, cosine variate
  first; odd counts discard the final sine variate but still consume
  both uniforms.
"""

from fairmarket import kernels

MASK64 = (1 << 64) - 1


def next_random(state):
    """One splitmix64 step: (state) -> (new_state, 64-bit output)."""
    return kernels.splitmix64_next(state)


def uniforms(state, n):
    """n uniform doubles in [0, 1); returns (new_state, array('d'))."""
    return kernels.uniform_block(state, n)


def normals(state, n):
    """n standard normals; returns (new_state, array('d'))."""
    return kernels.normal_block(state, n)
