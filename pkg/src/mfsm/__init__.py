"""Simulation and statistical-verification lab for multifractional stable motions."""

from ._accel import BACKEND
from .errors import (
    DomainError,
    InputError,
    MfsmError,
    NumericalError,
    ParameterError,
    ResourceCapError,
    UnsupportedKindError,
)
from .hurst import HurstFunction, PathContext, eval_hurst, verify_modulus
from .kernel import KernelPoint, eval_kernel, quad_exponent_swap_norm, quad_kernel_diff_alpha_norm
from .simulate import (
    JumpSet,
    SamplePath,
    TruncationWindow,
    default_window,
    path_from_jumps,
    riemann_oracle,
    sample_jumps,
    simulate_ensemble,
    truncation_error_bound,
)
from .stable_random import (
    RngStream,
    StableSpec,
    levy_unit_scale,
    sample_pareto,
    sample_poisson,
    sample_rademacher,
    sample_sas,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "__version__",
    "MfsmError",
    "ParameterError",
    "DomainError",
    "InputError",
    "UnsupportedKindError",
    "ResourceCapError",
    "NumericalError",
    "HurstFunction",
    "PathContext",
    "eval_hurst",
    "verify_modulus",
    "KernelPoint",
    "eval_kernel",
    "quad_kernel_diff_alpha_norm",
    "quad_exponent_swap_norm",
    "TruncationWindow",
    "JumpSet",
    "SamplePath",
    "sample_jumps",
    "path_from_jumps",
    "riemann_oracle",
    "truncation_error_bound",
    "default_window",
    "simulate_ensemble",
    "StableSpec",
    "RngStream",
    "sample_pareto",
    "sample_rademacher",
    "sample_poisson",
    "sample_sas",
    "levy_unit_scale",
]
