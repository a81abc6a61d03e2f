"""Coherent states on odd-dimensional spheres and their large-radius limit."""

__version__ = "0.1.0"

from .errors import (
    CutoffError,
    DomainError,
    OracleUnavailableError,
    OutOfRegimeError,
    QuadratureError,
    SphcsError,
    TruncationError,
    WindowError,
)
from .geometry import ComplexSpherePoint, PhasePoint, PhysicalParams
from .heatkernel import eval_kernel, eval_kernel_with_bound, spectral_kernel

__all__ = [
    "ComplexSpherePoint",
    "CutoffError",
    "DomainError",
    "OracleUnavailableError",
    "OutOfRegimeError",
    "PhasePoint",
    "PhysicalParams",
    "QuadratureError",
    "SphcsError",
    "TruncationError",
    "WindowError",
    "__version__",
    "eval_kernel",
    "eval_kernel_with_bound",
    "spectral_kernel",
]
