"""Path generation via truncated Poisson jump superposition, plus the
independent Riemann-sum oracle and truncation-error estimates.

A path on a grid ``t_1 < ... < t_n`` is built in four steps: draw the atom
count ``m ~ Poisson(2*(t_end-t0)*gamma**(-alpha))``, drop the atom times
uniformly on ``(t0, t_end]``, draw signed Pareto sizes, then superpose the
fractional power kernels.  Three modes share the machinery and differ only
in where the exponent is read: at the atom (``ito_msm``), at the grid time
(``classical_msm``), or constant (``lfsm``).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _accel
from .errors import DomainError, ParameterError, ResourceCapError
from .hurst import HurstFunction, eval_hurst_array
from .kernel import kernel_alpha_norm_tail, kernel_sq_norm
from .stable_random import RngStream, StableSpec, sample_pareto, sample_rademacher, sample_sas

__all__ = [
    "MODES",
    "ATOM_CAP",
    "WORK_CAP",
    "TruncationWindow",
    "JumpSet",
    "SamplePath",
    "TruncationErrorBound",
    "sample_jumps",
    "path_from_jumps",
    "riemann_oracle",
    "truncation_error_bound",
    "default_window",
    "simulate_ensemble",
]

MODES = ("ito_msm", "classical_msm", "lfsm")

ATOM_CAP = 10**8  # default cap on the expected atom count of one path
WORK_CAP = 2 * 10**9  # default cap on atoms x grid points per path


@dataclass(frozen=True)
class TruncationWindow:
    """Jump-time window (t0, t_end] and small-jump cutoff gamma."""

    t0: float
    t_end: float
    gamma: float

    def __post_init__(self):
        if not self.t0 < self.t_end:
            raise ParameterError(f"need t0 < t_end, got ({self.t0}, {self.t_end})")
        if not (math.isfinite(self.gamma) and self.gamma > 0.0):
            raise ParameterError(f"gamma must be positive, got {self.gamma}")

    def rate(self, alpha: float) -> float:
        """Expected atom count 2*(t_end - t0)*gamma**(-alpha)."""
        return 2.0 * (self.t_end - self.t0) * self.gamma ** (-alpha)

    def to_dict(self) -> dict:
        return {"t0": self.t0, "t_end": self.t_end, "gamma": self.gamma}


@dataclass
class JumpSet:
    """Atoms of the truncated Poisson point process, sorted by time."""

    times: np.ndarray
    sizes: np.ndarray
    window: TruncationWindow
    stable_alpha: float
    origin: dict = field(default_factory=dict)  # seed/stream bookkeeping

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=np.float64)
        self.sizes = np.asarray(self.sizes, dtype=np.float64)
        if self.times.shape != self.sizes.shape or self.times.ndim != 1:
            raise DomainError("times and sizes must be aligned 1-d arrays")
        if self.times.size:
            if np.any(np.diff(self.times) < 0.0):
                raise DomainError("jump times must be sorted")
            if np.any(self.times <= self.window.t0) or np.any(self.times > self.window.t_end):
                raise DomainError("jump times must lie in (t0, t_end]")
            if np.any(np.abs(self.sizes) < self.window.gamma):
                raise DomainError("every |size| must be >= gamma")

    def __len__(self) -> int:
        return int(self.times.size)


@dataclass
class SamplePath:
    """Grid, values and full provenance of one simulated path."""

    grid: np.ndarray
    values: np.ndarray
    mode: str
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=np.float64)
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.grid.shape != self.values.shape:
            raise DomainError("grid and values must be aligned")


def sample_jumps(
    window: TruncationWindow,
    alpha: float,
    rng: RngStream,
    atom_cap: float = ATOM_CAP,
) -> JumpSet:
    """Draw the truncated Poisson atoms on the window.

    Count ~ Poisson(2*(t_end-t0)*gamma**(-alpha)); times i.i.d. uniform on
    (t0, t_end]; sizes i.i.d. Rademacher x Pareto(gamma, alpha).  Draw
    order is fixed (count, times, signs, magnitudes) so a stream id pins
    the atoms; ties in time keep pre-sort order (stable argsort).
    """
    if not (0.0 < alpha < 2.0):
        raise ParameterError(f"alpha must lie in (0, 2), got {alpha}")
    lam = window.rate(alpha)
    if lam > atom_cap:
        raise ResourceCapError(
            f"expected atom count {lam:.3e} exceeds the cap {atom_cap:.1e}; "
            "raise gamma or shrink the window"
        )
    m = rng.poisson(lam)
    span = window.t_end - window.t0
    # u in [0,1) maps to times in (t0, t_end], matching the window convention
    times = window.t_end - span * rng.uniform_halfopen(m)
    signs = sample_rademacher(rng.uniform_open(m)) if m else np.empty(0)
    mags = sample_pareto(window.gamma, alpha, rng.uniform_open(m)) if m else np.empty(0)
    order = np.argsort(times, kind="stable")
    return JumpSet(
        times=times[order],
        sizes=(signs * mags)[order] if m else np.empty(0),
        window=window,
        stable_alpha=alpha,
        origin={"seed": rng.seed, "stream_id": rng.stream_id},
    )


def _provenance(jumps: JumpSet, hurst: HurstFunction, mode: str, extra: dict | None = None) -> dict:
    p = {
        "seed": jumps.origin.get("seed"),
        "stream_id": jumps.origin.get("stream_id"),
        "window": jumps.window.to_dict(),
        "hurst": hurst.to_dict(),
        "alpha": jumps.stable_alpha,
        "mode": mode,
        "method": "jump_superposition",
    }
    if extra:
        p.update(extra)
    return p


def path_from_jumps(
    jumps: JumpSet,
    hurst: HurstFunction,
    grid,
    mode: str,
    work_cap: float = WORK_CAP,
) -> SamplePath:
    """Superpose the atoms into path values on the grid.

    The kernel exponent ``H - 1/alpha`` is read at the atom time in
    ``ito_msm`` mode (with the path-adapted kind seeing the partial sum of
    strictly earlier atoms), at the grid time in ``classical_msm`` mode
    (deterministic H only), and is constant in ``lfsm`` mode.  Cost is
    O(atoms x grid); atoms are summed in index order per grid point.
    """
    if mode not in MODES:
        raise ParameterError(f"mode must be one of {MODES}, got {mode!r}")
    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size == 0:
        raise DomainError("grid must be a nonempty 1-d array")
    w = jumps.window
    if np.any(grid <= w.t0):
        raise DomainError(
            f"grid points at or left of the window start t0={w.t0} are outside the approximation"
        )
    if np.any(grid > w.t_end):
        raise DomainError(f"grid points beyond t_end={w.t_end} have no sampled jumps")
    alpha = jumps.stable_alpha
    m = len(jumps)
    if m * grid.size > work_cap:
        raise ResourceCapError(
            f"atoms x grid = {m * grid.size:.3e} exceeds the work cap {work_cap:.1e}"
        )
    if mode == "lfsm":
        if not hurst.is_constant:
            raise DomainError("lfsm mode requires a constant Hurst function")
        h_at_atoms = np.full(m, hurst.h_lo)
        values = _accel.superpose_fixed(grid, jumps.times, jumps.sizes, h_at_atoms - 1.0 / alpha)
    elif mode == "ito_msm":
        if hurst.kind == "adapted_to_path":
            # partial sums of strictly earlier atoms; atoms are time-sorted
            csum = np.cumsum(jumps.sizes) - jumps.sizes
            h_at_atoms = eval_hurst_array(hurst, jumps.times, ctx_sums=csum)
        else:
            h_at_atoms = eval_hurst_array(hurst, jumps.times)
        values = _accel.superpose_fixed(grid, jumps.times, jumps.sizes, h_at_atoms - 1.0 / alpha)
    else:
        if not hurst.is_deterministic:
            raise DomainError("classical_msm mode requires a deterministic Hurst function")
        h_at_grid = eval_hurst_array(hurst, grid)
        values = _accel.superpose_per_time(grid, h_at_grid - 1.0 / alpha, jumps.times, jumps.sizes)
    return SamplePath(grid=grid, values=values, mode=mode, provenance=_provenance(jumps, hurst, mode))


def riemann_oracle(
    grid,
    hurst: HurstFunction,
    spec: StableSpec,
    window_t0: float,
    step: float,
    rng: RngStream,
    mode: str = "lfsm",
    min_cells: int = 1000,
    work_cap: float = WORK_CAP,
) -> SamplePath:
    """Left-endpoint Riemann sum of the moving-average integral against
    exact stable increments.

    Cells of width ``step`` tile ``[window_t0, max(grid)]``; each carries an
    independent increment of scale ``spec.scale * step**(1/alpha)`` and the
    kernel is evaluated at the cell's left endpoint (adaptedness).  Pass
    ``StableSpec(alpha, levy_unit_scale(alpha))`` to target the same law as
    the jump superposition; the default unit scale targets the standardized
    driving noise.  Deterministic Hurst kinds only.
    """
    if mode not in MODES:
        raise ParameterError(f"mode must be one of {MODES}, got {mode!r}")
    if not hurst.is_deterministic:
        raise DomainError("the Riemann oracle supports deterministic Hurst kinds only")
    if mode == "lfsm" and not hurst.is_constant:
        raise DomainError("lfsm mode requires a constant Hurst function")
    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size == 0:
        raise DomainError("grid must be a nonempty 1-d array")
    t_max = float(grid.max())
    if not window_t0 < t_max:
        raise DomainError(f"window_t0={window_t0} must lie left of max(grid)={t_max}")
    if not step > 0.0:
        raise ParameterError(f"step must be positive, got {step}")
    n_cells = int(math.ceil((t_max - window_t0) / step))
    if n_cells < min_cells:
        raise ParameterError(
            f"step {step} gives only {n_cells} cells over [{window_t0}, {t_max}]; need >= {min_cells}"
        )
    if n_cells > ATOM_CAP or n_cells * grid.size > work_cap:
        raise ResourceCapError(f"{n_cells} cells exceed the resource cap for this grid")
    alpha = spec.alpha
    lefts = window_t0 + step * np.arange(n_cells)
    d_l = sample_sas(StableSpec(alpha, spec.scale * step ** (1.0 / alpha)), rng, size=n_cells)
    if mode == "classical_msm":
        h_at_grid = eval_hurst_array(hurst, grid)
        values = _accel.superpose_per_time(grid, h_at_grid - 1.0 / alpha, lefts, d_l)
    else:
        h_at_cells = eval_hurst_array(hurst, lefts)
        values = _accel.superpose_fixed(grid, lefts, d_l, h_at_cells - 1.0 / alpha)
    prov = {
        "seed": rng.seed,
        "stream_id": rng.stream_id,
        "window": {"t0": window_t0, "t_end": t_max, "step": step},
        "hurst": hurst.to_dict(),
        "alpha": alpha,
        "scale": spec.scale,
        "mode": mode,
        "method": "riemann_oracle",
    }
    return SamplePath(grid=grid, values=values, mode=mode, provenance=prov)


@dataclass(frozen=True)
class TruncationErrorBound:
    small_jump_l2: float
    far_past_lambda_alpha: float


def truncation_error_bound(
    window: TruncationWindow,
    grid_max_t: float,
    hurst: HurstFunction,
    alpha: float,
) -> TruncationErrorBound:
    """Size the two truncation errors of the jump superposition.

    ``small_jump_l2`` is the second moment of the dropped compensated
    small jumps: ``(2*alpha*gamma**(2-alpha)/(2-alpha))`` times the worst
    kernel square norm over the window (the actual H and the two constant
    range edges are tried).  ``far_past_lambda_alpha`` is the tail
    integral of ``|F_t|**alpha`` left of t0, reported with unit norm
    constant (the weak-space constant is not pinned down), so use it for
    relative comparisons only.
    """
    if not (0.0 < alpha < 2.0):
        raise ParameterError(f"alpha must lie in (0, 2), got {alpha}")
    if not window.t0 < grid_max_t <= window.t_end:
        raise DomainError("need t0 < grid_max_t <= t_end")
    small_mass = 2.0 * alpha * window.gamma ** (2.0 - alpha) / (2.0 - alpha)
    candidates = [
        HurstFunction(kind="constant", h_lo=hurst.h_lo, h_hi=hurst.h_lo),
        HurstFunction(kind="constant", h_lo=hurst.h_hi, h_hi=hurst.h_hi),
    ]
    if hurst.is_deterministic:
        candidates.append(hurst)
    sq = max(kernel_sq_norm(grid_max_t, window.t0, h, alpha) for h in candidates)
    far_h = hurst if hurst.is_deterministic else HurstFunction(kind="constant", h_lo=hurst.h_hi, h_hi=hurst.h_hi)
    far = kernel_alpha_norm_tail(grid_max_t, window.t0, far_h, alpha)
    return TruncationErrorBound(small_jump_l2=small_mass * sq, far_past_lambda_alpha=far)


def default_window(
    grid,
    alpha: float,
    hurst: HurstFunction,
    rel_l2: float = 1e-4,
    atom_cap: float = ATOM_CAP,
) -> TruncationWindow:
    """Heuristic window: t0 ten grid spans left of the grid, gamma sized so
    the small-jump second moment is at most ``rel_l2`` of the squared path
    scale (and never finer than the atom cap allows)."""
    from .stable_random import levy_unit_scale

    grid = np.asarray(grid, dtype=np.float64)
    lo, hi = float(grid.min()), float(grid.max())
    span = max(hi - lo, abs(hi), 1.0)
    t0 = lo - 10.0 * span
    probe = hurst if hurst.is_deterministic else HurstFunction(kind="constant", h_lo=hurst.h_hi, h_hi=hurst.h_hi)
    i_alpha = kernel_alpha_norm_tail(hi, t0, probe, alpha) + kernel_sq_norm(hi, t0, probe, alpha)
    scale_sq = (levy_unit_scale(alpha) * max(i_alpha, 1e-6) ** (1.0 / alpha)) ** 2
    sq = max(kernel_sq_norm(hi, t0, probe, alpha), 1e-12)
    gamma_target = (rel_l2 * scale_sq * (2.0 - alpha) / (2.0 * alpha * sq)) ** (1.0 / (2.0 - alpha))
    gamma_cap = (2.0 * (hi - t0) / atom_cap) ** (1.0 / alpha)
    return TruncationWindow(t0=t0, t_end=hi, gamma=max(gamma_target, gamma_cap))


def simulate_ensemble(
    window: TruncationWindow,
    alpha: float,
    hurst: HurstFunction,
    grid,
    mode: str,
    n_rep: int,
    seed: int,
    threads: int | None = None,
    first_stream: int = 0,
) -> list[SamplePath]:
    """Independent replicate paths, one RngStream per replicate.

    Replicates run on a thread pool (the hot kernels release the GIL);
    stream ids are ``first_stream + index`` so results are identical for
    any thread count.
    """
    if n_rep < 1:
        raise ParameterError(f"n_rep must be >= 1, got {n_rep}")

    def one(i: int) -> SamplePath:
        rng = RngStream(seed, first_stream + i)
        return path_from_jumps(sample_jumps(window, alpha, rng), hurst, grid, mode)

    if threads is None or threads <= 1 or n_rep == 1:
        return [one(i) for i in range(n_rep)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(one, range(n_rep)))
