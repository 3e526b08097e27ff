"""Hot inner loops of the jump-superposition simulator.

Two interchangeable backends compute the same sums:

* a numba ``@njit`` backend (default when numba imports cleanly),
* a pure-numpy backend, selected by setting the environment variable
  ``MFSM_NO_NUMBA=1`` before import (or used automatically if numba is
  unavailable).

Both evaluate, for grid times ``t_j``, atoms ``(x_i, y_i)`` and exponents
``e``::

    out[j] = sum_i y_i * ((t_j - x_i)_+ ** e - (-x_i)_+ ** e)

with the positive-part convention ``z_+**e = 0`` for ``z < 0``, ``0`` for
``z == 0, e > 0`` and an infinite sentinel for ``z == 0, e <= 0`` (never
NaN).  Atoms are always accumulated in ascending index order so results do
not depend on thread count, and constant-exponent runs of the two mode
kernels are bit-identical.

See ``benchmarks/bench_superpose.py`` for a backend comparison.
"""

from __future__ import annotations

import math
import os

import numpy as np

__all__ = [
    "BACKEND",
    "superpose_fixed",
    "superpose_per_time",
]

_ENV_FLAG = os.environ.get("MFSM_NO_NUMBA", "").strip().lower()
_WANT_NUMBA = _ENV_FLAG not in {"1", "true", "yes", "on"}

_CHUNK = 65536  # atoms per numpy block; bounds the (grid x chunk) temporary


def _pp_scalar(z: float, e: float) -> float:
    if z > 0.0:
        return z**e
    if z == 0.0 and e <= 0.0:
        return math.inf
    return 0.0


def _superpose_fixed_np(grid, times, sizes, exps):
    out = np.zeros(grid.shape[0])
    nonzero = grid != 0.0
    for lo in range(0, times.shape[0], _CHUNK):
        x = times[lo : lo + _CHUNK]
        y = sizes[lo : lo + _CHUNK]
        e = exps[lo : lo + _CHUNK]
        b = -x
        kb = np.zeros_like(b)
        pos = b > 0.0
        kb[pos] = b[pos] ** e[pos]
        sing = (b == 0.0) & (e <= 0.0)
        kb[sing] = np.inf
        a = grid[nonzero, None] - x[None, :]
        ka = np.zeros_like(a)
        pos = a > 0.0
        ee = np.broadcast_to(e, a.shape)
        ka[pos] = a[pos] ** ee[pos]
        sing = (a == 0.0) & (ee <= 0.0)
        ka[sing] = np.inf
        out[nonzero] += (ka - kb[None, :]) @ y
    return out


def _superpose_per_time_np(grid, exp_at_t, times, sizes):
    out = np.zeros(grid.shape[0])
    for j in range(grid.shape[0]):
        t = grid[j]
        if t == 0.0:
            continue
        e = exp_at_t[j]
        a = t - times
        ka = np.zeros_like(a)
        pos = a > 0.0
        ka[pos] = a[pos] ** e
        ka[(a == 0.0) & (e <= 0.0)] = np.inf
        b = -times
        kb = np.zeros_like(b)
        pos = b > 0.0
        kb[pos] = b[pos] ** e
        kb[(b == 0.0) & (e <= 0.0)] = np.inf
        out[j] = (ka - kb) @ sizes
    return out


def _build_numba():
    from numba import njit

    @njit(cache=True, nogil=True)
    def superpose_fixed_nb(grid, times, sizes, exps):
        out = np.zeros(grid.shape[0])
        for j in range(grid.shape[0]):
            t = grid[j]
            if t == 0.0:
                continue
            acc = 0.0
            for i in range(times.shape[0]):
                e = exps[i]
                a = t - times[i]
                if a > 0.0:
                    ka = a**e
                elif a == 0.0 and e <= 0.0:
                    ka = np.inf
                else:
                    ka = 0.0
                b = -times[i]
                if b > 0.0:
                    kb = b**e
                elif b == 0.0 and e <= 0.0:
                    kb = np.inf
                else:
                    kb = 0.0
                acc += sizes[i] * (ka - kb)
            out[j] = acc
        return out

    @njit(cache=True, nogil=True)
    def superpose_per_time_nb(grid, exp_at_t, times, sizes):
        out = np.zeros(grid.shape[0])
        for j in range(grid.shape[0]):
            t = grid[j]
            if t == 0.0:
                continue
            e = exp_at_t[j]
            acc = 0.0
            for i in range(times.shape[0]):
                a = t - times[i]
                if a > 0.0:
                    ka = a**e
                elif a == 0.0 and e <= 0.0:
                    ka = np.inf
                else:
                    ka = 0.0
                b = -times[i]
                if b > 0.0:
                    kb = b**e
                elif b == 0.0 and e <= 0.0:
                    kb = np.inf
                else:
                    kb = 0.0
                acc += sizes[i] * (ka - kb)
            out[j] = acc
        return out

    return superpose_fixed_nb, superpose_per_time_nb


if _WANT_NUMBA:
    try:
        _fixed, _per_time = _build_numba()
        BACKEND = "numba"
    except ImportError:  # pragma: no cover - exercised via env flag instead
        _fixed, _per_time = _superpose_fixed_np, _superpose_per_time_np
        BACKEND = "numpy"
else:
    _fixed, _per_time = _superpose_fixed_np, _superpose_per_time_np
    BACKEND = "numpy"


def _as_f8(a) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(a, dtype=np.float64))


def superpose_fixed(grid, times, sizes, exps) -> np.ndarray:
    """Superpose atoms whose kernel exponent is fixed per atom.

    Used for paths where the exponent is read at the atom location and for
    constant-exponent paths.
    """
    return _fixed(_as_f8(grid), _as_f8(times), _as_f8(sizes), _as_f8(exps))


def superpose_per_time(grid, exp_at_t, times, sizes) -> np.ndarray:
    """Superpose atoms whose kernel exponent is read at the grid time."""
    return _per_time(_as_f8(grid), _as_f8(exp_at_t), _as_f8(times), _as_f8(sizes))
