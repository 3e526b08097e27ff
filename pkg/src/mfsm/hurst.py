"""Hurst exponent functions H(.) with range and continuity metadata.

The catalog spans a constant, a smooth sine ramp, a Weierstrass-type rough
member, a piecewise-linear interpolant and a path-adapted random member
whose value at x is a bounded map of the truncated-jump sum strictly
before x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import ParameterError, UnsupportedKindError

__all__ = [
    "KINDS",
    "DETERMINISTIC_KINDS",
    "PathContext",
    "HurstFunction",
    "eval_hurst",
    "eval_hurst_array",
    "weierstrass_holder_exponent",
    "verify_modulus",
    "ModulusReport",
]

KINDS = (
    "constant",
    "smooth_catalog",
    "rough_weierstrass",
    "piecewise_linear",
    "adapted_to_path",
)
DETERMINISTIC_KINDS = KINDS[:4]

_ADAPTED_MAPS = ("logistic", "sine")


@dataclass(frozen=True)
class PathContext:
    """Filtration proxy for adapted H: truncated-jump sum strictly before x."""

    accumulated_jump_sum: float = 0.0


@dataclass(frozen=True)
class HurstFunction:
    """An exponent function with guaranteed range [h_lo, h_hi] in (0, 1).

    ``params`` are kind-specific:

    * ``constant``: none (requires ``h_lo == h_hi``).
    * ``smooth_catalog`` (sine ramp): ``frequency`` (default 1.0), ``phase``
      (default 0.0); fills the range exactly.
    * ``rough_weierstrass``: ``a`` in (0,1), ``b`` > 1, ``n_terms``,
      ``amplitude`` in [0,1] (default 1);
      ``W(x) = sum_k a^k cos(b^k x)``, affinely rescaled into the range and
      clamped.  Empirical Hoelder exponent log(1/a)/log(b) when a*b > 1.
    * ``piecewise_linear``: ``knots`` = [[x, h], ...] with increasing x;
      constant extension outside the knot span.
    * ``adapted_to_path``: ``map`` in {"logistic", "sine"}, ``map_scale``
      (default 1.0); value = bounded map of the PathContext sum.
    """

    kind: str
    h_lo: float
    h_hi: float
    params: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown Hurst kind {self.kind!r}; expected one of {KINDS}")
        if not (0.0 < self.h_lo <= self.h_hi < 1.0):
            raise ParameterError(
                f"need 0 < h_lo <= h_hi < 1, got h_lo={self.h_lo}, h_hi={self.h_hi}"
            )
        p = dict(self.params)
        if self.kind == "constant":
            if self.h_lo != self.h_hi:
                raise ParameterError("constant kind requires h_lo == h_hi")
        elif self.kind == "smooth_catalog":
            p.setdefault("frequency", 1.0)
            p.setdefault("phase", 0.0)
        elif self.kind == "rough_weierstrass":
            a = p.get("a", 0.5)
            b = p.get("b", 7.0)
            n = p.get("n_terms", 8)
            amp = p.get("amplitude", 1.0)
            if not (0.0 < a < 1.0):
                raise ParameterError(f"rough_weierstrass needs a in (0,1), got {a}")
            if not b > 1.0:
                raise ParameterError(f"rough_weierstrass needs b > 1, got {b}")
            if not (isinstance(n, (int, np.integer)) and n >= 1):
                raise ParameterError(f"rough_weierstrass needs n_terms >= 1, got {n}")
            if not (0.0 <= amp <= 1.0):
                raise ParameterError(f"rough_weierstrass needs amplitude in [0,1], got {amp}")
            p.update(a=float(a), b=float(b), n_terms=int(n), amplitude=float(amp))
        elif self.kind == "piecewise_linear":
            knots = p.get("knots")
            if not knots or len(knots) < 2:
                raise ParameterError("piecewise_linear needs at least 2 knots")
            xs = [float(k[0]) for k in knots]
            hs = [float(k[1]) for k in knots]
            if any(x2 <= x1 for x1, x2 in zip(xs, xs[1:])):
                raise ParameterError("piecewise_linear knot abscissae must increase strictly")
            if any(not (self.h_lo <= h <= self.h_hi) for h in hs):
                raise ParameterError("piecewise_linear knot values must lie in [h_lo, h_hi]")
            p["knots"] = [[x, h] for x, h in zip(xs, hs)]
        elif self.kind == "adapted_to_path":
            m = p.setdefault("map", "logistic")
            p.setdefault("map_scale", 1.0)
            if m not in _ADAPTED_MAPS:
                raise ParameterError(f"adapted map must be one of {_ADAPTED_MAPS}, got {m!r}")
        object.__setattr__(self, "params", p)

    @property
    def is_deterministic(self) -> bool:
        return self.kind != "adapted_to_path"

    @property
    def is_constant(self) -> bool:
        return self.kind == "constant"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "h_lo": self.h_lo, "h_hi": self.h_hi, "params": dict(self.params)}

    @classmethod
    def from_dict(cls, d: Mapping) -> "HurstFunction":
        extra = set(d) - {"kind", "h_lo", "h_hi", "params"}
        if extra:
            raise ParameterError(f"unknown Hurst descriptor fields: {sorted(extra)}")
        return cls(
            kind=d.get("kind", ""),
            h_lo=float(d.get("h_lo", 0.0)),
            h_hi=float(d.get("h_hi", 0.0)),
            params=dict(d.get("params", {})),
        )


def weierstrass_holder_exponent(h: HurstFunction) -> float:
    """log(1/a)/log(b) for the rough catalog member (requires a*b > 1)."""
    if h.kind != "rough_weierstrass":
        raise UnsupportedKindError("only rough_weierstrass has a Weierstrass exponent")
    a, b = h.params["a"], h.params["b"]
    if a * b <= 1.0:
        raise ParameterError("Weierstrass exponent needs a*b > 1")
    return math.log(1.0 / a) / math.log(b)


def _raw_values(h: HurstFunction, xs: np.ndarray) -> np.ndarray:
    lo, hi = h.h_lo, h.h_hi
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    if h.kind == "constant":
        return np.full_like(xs, lo)
    if h.kind == "smooth_catalog":
        f = float(h.params["frequency"])
        ph = float(h.params["phase"])
        return mid + half * np.sin(2.0 * np.pi * f * xs + ph)
    if h.kind == "rough_weierstrass":
        a = h.params["a"]
        b = h.params["b"]
        n = h.params["n_terms"]
        amp = h.params["amplitude"]
        w = np.zeros_like(xs)
        norm = 0.0
        for k in range(n):
            w += a**k * np.cos(b**k * xs)
            norm += a**k
        return mid + amp * half * (w / norm)
    if h.kind == "piecewise_linear":
        knots = h.params["knots"]
        kx = np.array([k[0] for k in knots])
        kh = np.array([k[1] for k in knots])
        return np.interp(xs, kx, kh)
    raise UnsupportedKindError(f"deterministic evaluation undefined for kind {h.kind!r}")


def _adapted_value(h: HurstFunction, ctx_sum: float) -> float:
    lo, hi = h.h_lo, h.h_hi
    z = float(h.params["map_scale"]) * ctx_sum
    if h.params["map"] == "logistic":
        frac = 1.0 / (1.0 + math.exp(-z))
    else:
        frac = 0.5 * (1.0 + math.sin(z))
    return lo + (hi - lo) * frac


def eval_hurst(h: HurstFunction, x: float, ctx: PathContext | None = None) -> float:
    """H evaluated at x, always clamped into [h_lo, h_hi].

    Deterministic kinds ignore ``ctx``; the adapted kind reads only
    ``ctx.accumulated_jump_sum`` (zero when no context is given).
    """
    if h.kind == "adapted_to_path":
        s = ctx.accumulated_jump_sum if ctx is not None else 0.0
        v = _adapted_value(h, s)
    else:
        v = float(_raw_values(h, np.asarray([float(x)]))[0])
    return min(max(v, h.h_lo), h.h_hi)


def eval_hurst_array(h: HurstFunction, xs, ctx_sums=None) -> np.ndarray:
    """Vectorized evaluation; adapted kind needs per-point context sums."""
    xs = np.asarray(xs, dtype=np.float64)
    if h.kind == "adapted_to_path":
        if ctx_sums is None:
            raise UnsupportedKindError("adapted_to_path needs ctx_sums for array evaluation")
        s = np.asarray(ctx_sums, dtype=np.float64)
        z = float(h.params["map_scale"]) * s
        if h.params["map"] == "logistic":
            frac = 1.0 / (1.0 + np.exp(-z))
        else:
            frac = 0.5 * (1.0 + np.sin(z))
        v = h.h_lo + (h.h_hi - h.h_lo) * frac
    else:
        v = _raw_values(h, xs)
    return np.clip(v, h.h_lo, h.h_hi)


@dataclass(frozen=True)
class ModulusReport:
    holds: bool
    worst_ratio: float
    worst_separation: float


def _modulus_fn(w_kind):
    tag = w_kind[0]
    if tag == "holder":
        _, rho, c = w_kind
        if not (0.0 < rho <= 1.0 and c > 0.0):
            raise ParameterError(f"holder modulus needs rho in (0,1], c > 0, got {w_kind}")
        return lambda d: c * d**rho
    if tag == "log_inverse":
        _, c = w_kind
        if not c > 0.0:
            raise ParameterError(f"log_inverse modulus needs c > 0, got {w_kind}")
        return lambda d: c / (1.0 + abs(np.log(d)))
    raise ParameterError(f"unknown modulus kind {tag!r}")


def verify_modulus(h: HurstFunction, w_kind, grid_step: float, window) -> ModulusReport:
    """Check |H(t)-H(s)| <= w(|t-s|) on all grid pairs with |t-s| <= 1.

    ``w_kind`` is ``("holder", rho, c)`` for ``w(d)=c*d**rho`` or
    ``("log_inverse", c)`` for ``w(d)=c/(1+|log d|)``.  Scans every lag
    (vectorized per lag, so O(n^2) arithmetic but O(n) memory) and returns
    the worst observed ratio |dH|/w.
    """
    if not h.is_deterministic:
        raise UnsupportedKindError("modulus of a path-adapted H is not grid-checkable")
    if not grid_step > 0.0:
        raise ParameterError(f"grid_step must be positive, got {grid_step}")
    a, b = float(window[0]), float(window[1])
    if not b > a:
        raise ParameterError("window must satisfy a < b")
    w = _modulus_fn(w_kind)
    n = int(math.floor((b - a) / grid_step)) + 1
    xs = a + grid_step * np.arange(n)
    vals = eval_hurst_array(h, xs)
    worst = 0.0
    worst_sep = 0.0
    max_lag = min(n - 1, int(math.floor(1.0 / grid_step)))
    for k in range(1, max_lag + 1):
        sep = k * grid_step
        dh = float(np.max(np.abs(vals[k:] - vals[:-k])))
        ratio = dh / w(sep)
        if ratio > worst:
            worst, worst_sep = ratio, sep
    # 1e-9 slack absorbs float rounding when |dH| == w exactly
    return ModulusReport(holds=worst <= 1.0 + 1e-9, worst_ratio=worst, worst_separation=worst_sep)
