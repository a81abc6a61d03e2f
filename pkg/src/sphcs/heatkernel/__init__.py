"""Odd-dimensional sphere heat kernels at complex angle."""

from .evaluate import (
    KernelValue,
    eval_kernel,
    eval_kernel_with_bound,
    normalization_integral,
    reduce_angle,
)
from .series import reduced_series, series_value
from .spectral import SpectralSeries, spectral_kernel, spectral_series_info, sphere_volume
from .terms import (
    DEFAULT_WINDOW,
    GaussianTermSum,
    Term,
    kernel_d1,
    kernel_representation,
    recursion_step,
)

__all__ = [
    "DEFAULT_WINDOW",
    "GaussianTermSum",
    "KernelValue",
    "SpectralSeries",
    "Term",
    "eval_kernel",
    "eval_kernel_with_bound",
    "kernel_d1",
    "kernel_representation",
    "normalization_integral",
    "recursion_step",
    "reduce_angle",
    "reduced_series",
    "series_value",
    "spectral_kernel",
    "spectral_series_info",
    "sphere_volume",
]
