"""Counter-based uniform streams (Philox4x32-10).

Every uniform is a pure function of ``(seed, trial, draw)``, so a Monte Carlo
run gives the same numbers no matter how its trials are split over workers.
"""

from __future__ import annotations

import numpy as np

_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint64(0x9E3779B9)
_W1 = np.uint64(0xBB67AE85)
_MASK = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)
_ROUNDS = 10

# 2**-53, maps a 53-bit integer onto [0, 1)
_TO_UNIT = 1.0 / 9007199254740992.0


def philox4x32(counter, key):
    """Apply Philox4x32-10 to broadcastable word arrays.

    ``counter`` is a 4-tuple of uint32-valued arrays, ``key`` a 2-tuple. Returns
    four uint64 arrays holding the 32-bit output words.
    """
    c0, c1, c2, c3 = (np.asarray(w, dtype=np.uint64) & _MASK for w in counter)
    k0, k1 = (np.asarray(w, dtype=np.uint64) & _MASK for w in key)
    c0, c1, c2, c3, k0, k1 = np.broadcast_arrays(c0, c1, c2, c3, k0, k1)
    for r in range(_ROUNDS):
        p0 = c0 * _M0
        p1 = c2 * _M1
        c0, c1, c2, c3 = (
            ((p1 >> _S32) ^ c1 ^ k0) & _MASK,
            p1 & _MASK,
            ((p0 >> _S32) ^ c3 ^ k1) & _MASK,
            p0 & _MASK,
        )
        if r < _ROUNDS - 1:
            k0 = (k0 + _W0) & _MASK
            k1 = (k1 + _W1) & _MASK
    return c0, c1, c2, c3


def _split64(x):
    x = np.asarray(x, dtype=np.uint64)
    return x & _MASK, x >> _S32


def uniforms(seed, trials, n_draws: int, first_draw: int = 0) -> np.ndarray:
    """Uniforms on [0, 1) with shape ``trials.shape + (n_draws,)``.

    Returns draws ``first_draw .. first_draw + n_draws - 1`` of each stream.
    ``seed`` may be a scalar or an array broadcastable against ``trials``.
    Each Philox block yields two 53-bit doubles, so draw ``d`` lives in block
    ``d // 2``, slot ``d % 2``.
    """
    if n_draws < 0 or first_draw < 0:
        raise ValueError("n_draws and first_draw must be non-negative")
    trials = np.asarray(trials, dtype=np.uint64)
    seed = np.asarray(seed, dtype=np.uint64)
    seed, trials = np.broadcast_arrays(seed, trials)
    b0 = first_draw // 2
    n_blocks = (first_draw + n_draws + 1) // 2 - b0
    blocks = np.arange(b0, b0 + n_blocks, dtype=np.uint64)
    t_lo, t_hi = _split64(trials[..., None])
    s_lo, s_hi = _split64(seed[..., None])
    o0, o1, o2, o3 = philox4x32((t_lo, t_hi, blocks, np.uint64(0)), (s_lo, s_hi))
    a = ((o0 << _S32) | o1) >> np.uint64(11)
    b = ((o2 << _S32) | o3) >> np.uint64(11)
    out = np.stack([a, b], axis=-1).reshape(trials.shape + (2 * n_blocks,))
    skip = first_draw - 2 * b0
    return out[..., skip:skip + n_draws].astype(np.float64) * _TO_UNIT
