"""Deterministic random number generation for the sampler.

All chain-level randomness flows through a splitmix64 generator so that a
chain is reproducible bit-for-bit from its integer seed, both from Python
code and from inside the jitted sweep kernel (which advances the same
state array through the same jitted primitives).

Stream conventions, fixed for reproducibility:

* ``u01`` consumes one 64-bit step and returns ``((z >> 12) + 0.5) * 2**-52``,
  a float strictly inside (0, 1).
* ``normal`` consumes two ``u01`` draws (Box-Muller, cosine branch only).
* ``shuffle`` is a Fisher-Yates pass consuming one ``u01`` per swap.
* ``derive_seed(master, index)`` = splitmix64 finalizer applied to
  ``master XOR index``; the harness uses it to give each replication (and
  each chain within a replication) an independent stream.
"""

from __future__ import annotations

import numpy as np

from ._kernels import _mix64, _normal, _shuffle_prefix, _u01

_MASK64 = 0xFFFFFFFFFFFFFFFF


def derive_seed(master: int, index: int) -> int:
    """Derive a child seed from a master seed and a stream index."""
    if index < 0:
        raise ValueError("stream index must be nonnegative")
    return int(_mix64(np.uint64((master ^ index) & _MASK64)))


class Rng:
    """Splitmix64 stream usable interchangeably with the jitted kernels."""

    def __init__(self, seed: int):
        self._state = np.array([seed & _MASK64], dtype=np.uint64)

    def u01(self) -> float:
        """Uniform draw strictly inside (0, 1)."""
        return float(_u01(self._state))

    def normal(self) -> float:
        """Standard normal draw (consumes two uniforms)."""
        return float(_normal(self._state))

    def shuffle(self, arr: np.ndarray) -> None:
        """In-place Fisher-Yates shuffle of a 1-d integer array."""
        _shuffle_prefix(self._state, arr, arr.shape[0])

    @property
    def state(self) -> int:
        return int(self._state[0])
