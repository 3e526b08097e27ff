"""Deterministic, seedable random sources.

Everything the simulator draws comes through here: uniforms, Poisson
counts, Rademacher signs, Pareto jump magnitudes and symmetric
alpha-stable variates.  Streams are counter-based (Philox) so that
``(seed, stream_id)`` pins the variate sequence independently of thread
schedule, and distinct stream ids are independent by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

__all__ = [
    "StableSpec",
    "RngStream",
    "sample_pareto",
    "sample_rademacher",
    "sample_poisson",
    "sample_sas",
    "levy_unit_scale",
]

_U64 = 2**64


@dataclass(frozen=True)
class StableSpec:
    """Symmetric alpha-stable law.

    ``scale`` is the sigma for which the characteristic function of a
    unit-time increment is ``exp(-(sigma**alpha) * |t|**alpha)``; the
    default ``scale=1`` is the standardized driving noise.
    """

    alpha: float
    scale: float = 1.0

    def __post_init__(self):
        if not (isinstance(self.alpha, (int, float)) and 0.0 < self.alpha <= 2.0):
            raise ParameterError(f"alpha must lie in (0, 2], got {self.alpha}")
        if not (isinstance(self.scale, (int, float)) and math.isfinite(self.scale) and self.scale > 0.0):
            raise ParameterError(f"scale must be a positive finite real, got {self.scale}")


class RngStream:
    """Counter-based random stream keyed by ``(seed, stream_id)``.

    Stream handles are cheap values; one stream per replicate gives
    reproducible parallelism (the 128-bit Philox key is the pair itself,
    so distinct ids never share state).
    """

    def __init__(self, seed: int, stream_id: int = 0):
        for name, v in (("seed", seed), ("stream_id", stream_id)):
            if not isinstance(v, (int, np.integer)) or not (0 <= int(v) < _U64):
                raise ParameterError(f"{name} must be an unsigned 64-bit integer, got {v!r}")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        self._gen = np.random.Generator(np.random.Philox(key=key))

    def spawn(self, stream_id: int) -> "RngStream":
        """Fresh stream with the same seed and a new id."""
        return RngStream(self.seed, stream_id)

    def uniform_halfopen(self, size=None) -> np.ndarray | float:
        """Uniform draw(s) on [0, 1)."""
        return self._gen.random(size)

    def uniform_open(self, size=None) -> np.ndarray | float:
        """Uniform draw(s) on the open interval (0, 1)."""
        u = self._gen.random(size)
        if size is None:
            while u == 0.0:  # pragma: no cover - probability 2**-53
                u = self._gen.random()
            return u
        zero = u == 0.0
        while zero.any():  # pragma: no cover - probability 2**-53 per draw
            u[zero] = self._gen.random(int(zero.sum()))
            zero = u == 0.0
        return u

    def poisson(self, lam: float) -> int:
        return int(self._gen.poisson(lam))

    def __repr__(self):  # pragma: no cover
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


def sample_pareto(gamma: float, alpha: float, u):
    """Inverse-CDF Pareto draw: ``gamma * u**(-1/alpha)``.

    The result has survival function ``(gamma/y)**alpha`` on
    ``[gamma, inf)``; ``u`` may be a scalar or an array in ``(0, 1]``.
    """
    if not (math.isfinite(gamma) and gamma > 0.0):
        raise ParameterError(f"gamma must be positive, got {gamma}")
    if not (0.0 < alpha <= 2.0):
        raise ParameterError(f"alpha must lie in (0, 2], got {alpha}")
    u_arr = np.asarray(u, dtype=np.float64)
    if np.any(u_arr <= 0.0) or np.any(u_arr > 1.0):
        raise ParameterError("u must lie in (0, 1]")
    out = gamma * u_arr ** (-1.0 / alpha)
    return float(out) if np.isscalar(u) or out.ndim == 0 else out


def sample_rademacher(u):
    """Map a uniform in (0, 1) to a sign: -1 below 1/2, +1 otherwise."""
    u_arr = np.asarray(u, dtype=np.float64)
    if np.any(u_arr <= 0.0) or np.any(u_arr >= 1.0):
        raise ParameterError("u must lie in (0, 1)")
    out = np.where(u_arr < 0.5, -1.0, 1.0)
    return float(out) if np.isscalar(u) or out.ndim == 0 else out


def sample_poisson(lam: float, rng: RngStream) -> int:
    """Exact Poisson count (inversion below rate 10, PTRS rejection above)."""
    if not (isinstance(lam, (int, float)) and math.isfinite(lam) and lam >= 0.0):
        raise ParameterError(f"lambda must be a finite nonnegative real, got {lam}")
    return rng.poisson(lam)


def sample_sas(spec: StableSpec, rng: RngStream, size=None):
    """Symmetric alpha-stable variate(s) via the Chambers-Mallows-Stuck map.

    Characteristic function ``exp(-(scale**alpha)|t|**alpha)``.  The
    symmetric case needs no drift correction at ``alpha == 1`` (plain
    Cauchy, ``tan`` of a uniform angle); ``alpha == 2`` reduces to a
    centered Gaussian with variance ``2*scale**2``.
    """
    theta = np.pi * (rng.uniform_open(size) - 0.5)
    w = -np.log(rng.uniform_open(size))
    a = spec.alpha
    if a == 1.0:
        x = np.tan(theta)
    elif a == 2.0:
        x = 2.0 * np.sin(theta) * np.sqrt(w)
    else:
        x = (
            np.sin(a * theta)
            / np.cos(theta) ** (1.0 / a)
            * (np.cos((1.0 - a) * theta) / w) ** ((1.0 - a) / a)
        )
    out = spec.scale * x
    return float(out) if size is None else out


def levy_unit_scale(alpha: float) -> float:
    """Scale sigma of the unit-time increment of the Levy motion whose jump
    intensity is ``alpha * |y|**(-alpha-1) dy``.

    The characteristic exponent of that motion is ``c(alpha) * |t|**alpha``
    with ``c(alpha) = 2*Gamma(2-alpha)*cos(pi*alpha/2)/(1-alpha)`` (value
    ``pi`` at ``alpha == 1``), i.e. sigma = c(alpha)**(1/alpha) in the
    ``StableSpec`` convention.  Pass ``StableSpec(alpha, levy_unit_scale(alpha))``
    to the Riemann oracle to match the jump superposition; diverges as
    alpha -> 2 (a Gaussian has no jump representation).
    """
    if not (0.0 < alpha < 2.0):
        raise ParameterError(f"alpha must lie in (0, 2), got {alpha}")
    if alpha == 1.0:
        c = math.pi
    else:
        c = 2.0 * math.gamma(2.0 - alpha) * math.cos(math.pi * alpha / 2.0) / (1.0 - alpha)
    return c ** (1.0 / alpha)
