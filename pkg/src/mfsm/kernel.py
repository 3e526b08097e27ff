"""Moving-average kernel evaluation and quadrature checks of its integral bounds.

The kernel is ``F_t(x) = (t-x)_+**e - (-x)_+**e`` with ``e = H(x) - 1/alpha``.
Besides pointwise evaluation, this module verifies by adaptive quadrature the
scaling of the three regional integrals of ``|F_{t+h} - F_t|**alpha`` (far
past, near past, new mass) and the exponent-swap bound used by the tangent
analysis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import NumericalError, ParameterError, UnsupportedKindError
from .hurst import HurstFunction, eval_hurst

__all__ = [
    "KernelPoint",
    "positive_part_pow",
    "eval_kernel",
    "quad_kernel_diff_alpha_norm",
    "quad_exponent_swap_norm",
    "kernel_alpha_norm_tail",
    "kernel_sq_norm",
]

REGIONS = ("far_past", "near_past", "new_mass")

_TAIL_STOP = 1e-16  # far-past segments stop below this fraction of the running total
_MAX_SEGMENTS = 200


@dataclass(frozen=True)
class KernelPoint:
    """One kernel evaluation site: time t, integration variable x, H at x."""

    t: float
    x: float
    h_at_x: float
    alpha: float

    def __post_init__(self):
        if not (0.0 < self.alpha <= 2.0):
            raise ParameterError(f"alpha must lie in (0, 2], got {self.alpha}")
        if not (0.0 < self.h_at_x < 1.0):
            raise ParameterError(f"h_at_x must lie in (0, 1), got {self.h_at_x}")


def positive_part_pow(z: float, e: float) -> float:
    """``(z)_+ ** e`` with the conventions 0**e = 0 for e > 0 and an
    infinite sentinel (never NaN) at the singular point z == 0, e <= 0;
    strictly negative arguments contribute 0 regardless of e."""
    if z > 0.0:
        return z**e
    if z == 0.0 and e <= 0.0:
        return math.inf
    return 0.0


def eval_kernel(p: KernelPoint) -> float:
    """``(t-x)_+**e - (-x)_+**e`` at ``e = h_at_x - 1/alpha``.

    Exactly zero for t == 0 (anchors X(0) = 0) and whenever
    x >= max(t, 0); a signed infinite sentinel marks x at a singularity
    (x == t or x == 0) when e <= 0 -- quadrature callers must split there.
    """
    if p.t == 0.0:
        return 0.0
    e = p.h_at_x - 1.0 / p.alpha
    return positive_part_pow(p.t - p.x, e) - positive_part_pow(-p.x, e)


def _quad_raw(f, a, b, rtol, points=None, epsabs=1e-14):
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        return integrate.quad(f, a, b, epsabs=epsabs, epsrel=rtol, limit=200, points=points)


def _check(val, err, where, rtol):
    scale = max(abs(val), 1e-12)
    # requested tolerance is rtol; declare failure only when the achieved
    # tolerance is grossly worse (roundoff-limited results stay usable)
    if err > max(1e-3 * scale, 1e-10):
        raise NumericalError(
            f"quadrature {where} achieved abs error {err:.3e} for value {val:.6e}",
            achieved_tol=err / scale,
        )


def _quad(f, a, b, rtol, points=None):
    val, err = _quad_raw(f, a, b, rtol, points)
    _check(val, err, f"on [{a}, {b}]", rtol)
    return val


def _geometric_tail(f, right: float, rtol: float, first_width: float, decay_margin: float) -> float:
    """Integrate f over (-inf, right] by geometrically grown segments.

    Stops when the analytic remainder bound ``f(left)*|left|/decay_margin``
    drops below ``rtol`` of the running total (``decay_margin`` is the
    positive excess of the integrand's algebraic decay over 1/|x|), or
    when the integrand itself falls below 1e-16 of the total.
    """
    total = 0.0
    err_total = 0.0
    width = first_width
    hi = right
    margin = max(decay_margin, 0.01)
    for k in range(_MAX_SEGMENTS):
        lo = hi - width
        epsabs = max(1e-14, 1e-3 * rtol * abs(total))
        seg, err = _quad_raw(f, lo, hi, rtol, epsabs=epsabs)
        total += seg
        err_total += err
        hi = lo
        width *= 2.0
        if k >= 1:
            if total == 0.0 and seg == 0.0:
                return 0.0
            f_left = abs(f(lo))
            remainder = f_left * max(abs(lo), 1.0) / margin
            if remainder <= rtol * abs(total) or f_left <= _TAIL_STOP * abs(total):
                _check(total, err_total, f"over (-inf, {right}]", rtol)
                return total
    raise NumericalError("far-past tail did not converge within the segment budget")


def _require_deterministic(h: HurstFunction, what: str):
    if not h.is_deterministic:
        raise UnsupportedKindError(f"{what} requires a deterministic Hurst kind")


def quad_kernel_diff_alpha_norm(
    t: float,
    h: float,
    region: str,
    hurst: HurstFunction,
    alpha: float,
    epsilon: float | None = None,
    rtol: float = 1e-6,
) -> float:
    """Regional integral of ``|F_{t+h}(x) - F_t(x)|**alpha``.

    Regions: ``far_past`` integrates over (-inf, t-epsilon], ``near_past``
    over [t-epsilon, t], and ``new_mass`` evaluates
    ``integral_t^{t+h} (t+h-x)**(alpha*H(x)-1) dx`` (the kernel of F_t
    vanishes there).  Inside the far/near regions the anchor terms
    ``(-x)_+**e`` cancel, so the integrand reduces to
    ``|(t+h-x)**e - (t-x)_+**e|**alpha`` with ``e = H(x) - 1/alpha``.
    """
    if region not in REGIONS:
        raise ParameterError(f"region must be one of {REGIONS}, got {region!r}")
    if not (0.0 < h < 0.5):
        raise ParameterError(f"h must lie in (0, 1/2), got {h}")
    if not (0.0 < alpha < 2.0):
        raise ParameterError(f"alpha must lie in (0, 2), got {alpha}")
    _require_deterministic(hurst, "kernel quadrature")
    if region in ("far_past", "near_past"):
        if epsilon is None or not (0.0 < epsilon < 1.0):
            raise ParameterError(f"{region} needs epsilon in (0, 1), got {epsilon}")

    inv_a = 1.0 / alpha

    def diff_integrand(x: float) -> float:
        # both powers share the exponent, so for x < t the difference
        # (t+h-x)^e - (t-x)^e = u^e * expm1(e*log1p(h/u)) is cancellation-free
        e = eval_hurst(hurst, x) - inv_a
        u = t - x
        if u > 0.0:
            return abs(u**e * math.expm1(e * math.log1p(h / u))) ** alpha
        return abs(positive_part_pow(t + h - x, e) - positive_part_pow(u, e)) ** alpha

    if region == "far_past":
        return _geometric_tail(
            diff_integrand, t - epsilon, rtol,
            first_width=max(1.0, 2.0 * epsilon),
            decay_margin=alpha * (1.0 - hurst.h_hi),
        )
    if region == "near_past":
        return _quad(diff_integrand, t - epsilon, t, rtol)

    def new_mass_integrand(x: float) -> float:
        return (t + h - x) ** (alpha * eval_hurst(hurst, x) - 1.0)

    return _quad(new_mass_integrand, t, t + h, rtol)


def quad_exponent_swap_norm(
    h: float,
    a: HurstFunction,
    b: HurstFunction,
    alpha: float,
    rtol: float = 1e-6,
) -> float:
    """Integral over the whole line of the alpha-power of the kernel change
    when the exponent function is swapped from a(.) to b(.) at lag h.

    The integrand is supported on x < h; it is split at 0 and h and the
    left tail is accumulated geometrically.
    """
    if not (0.0 < h < 1.0 / math.e):
        raise ParameterError(f"h must lie in (0, 1/e), got {h}")
    if not (0.0 < alpha < 2.0):
        raise ParameterError(f"alpha must lie in (0, 2), got {alpha}")
    _require_deterministic(a, "exponent-swap quadrature")
    _require_deterministic(b, "exponent-swap quadrature")

    inv_a = 1.0 / alpha

    def integrand(x: float) -> float:
        ea = eval_hurst(a, x) - inv_a
        eb = eval_hurst(b, x) - inv_a
        da = positive_part_pow(h - x, ea) - positive_part_pow(-x, ea)
        db = positive_part_pow(h - x, eb) - positive_part_pow(-x, eb)
        return abs(da - db) ** alpha

    middle = _quad(integrand, 0.0, h, rtol)
    tail = _geometric_tail(
        integrand, 0.0, rtol, first_width=max(1.0, 2.0 * h),
        decay_margin=alpha * (1.0 - max(a.h_hi, b.h_hi)) / 2.0,  # halved for the log factor
    )
    return middle + tail


def kernel_alpha_norm_tail(t: float, t0: float, hurst: HurstFunction, alpha: float, rtol: float = 1e-6) -> float:
    """``integral_{-inf}^{t0} |F_t(x)|**alpha dx`` by geometric segments."""
    if not t0 < t:
        raise ParameterError(f"need t0 < t, got t0={t0}, t={t}")
    _require_deterministic(hurst, "kernel tail quadrature")
    inv_a = 1.0 / alpha

    def integrand(x: float) -> float:
        e = eval_hurst(hurst, x) - inv_a
        if x < 0.0 and x < t:
            # (t-x)^e - (-x)^e without cancellation via expm1
            return abs((-x) ** e * math.expm1(e * math.log1p(t / (-x)))) ** alpha
        return abs(positive_part_pow(t - x, e) - positive_part_pow(-x, e)) ** alpha

    return _geometric_tail(
        integrand, t0, rtol, first_width=max(1.0, abs(t0)),
        decay_margin=alpha * (1.0 - hurst.h_hi),
    )


def kernel_sq_norm(t: float, t0: float, hurst: HurstFunction, alpha: float, rtol: float = 1e-6) -> float:
    """``integral_{t0}^{t} F_t(x)**2 dx`` (splits at 0 and at t)."""
    if not t0 < t:
        raise ParameterError(f"need t0 < t, got t0={t0}, t={t}")
    _require_deterministic(hurst, "kernel square-norm quadrature")
    inv_a = 1.0 / alpha

    def integrand(x: float) -> float:
        e = eval_hurst(hurst, x) - inv_a
        v = positive_part_pow(t - x, e) - positive_part_pow(-x, e)
        return v * v

    pts = sorted(p for p in (0.0,) if t0 < p < t)
    return _quad(integrand, t0, t, rtol, points=pts or None)
