"""Numerical evaluation of ``rho_tau^d`` at complex angle, with a lattice-truncation certificate."""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from scipy import integrate

from ..errors import DomainError, QuadratureError, TruncationError
from .series import DEFAULT_SERIES_ORDER, reduced_series, series_value
from .spectral import sphere_volume
from .terms import DEFAULT_WINDOW, TWO_PI, kernel_representation

DEFAULT_THETA_MAX_IM = 1.0
DEFAULT_THETA_SWITCH = 0.5
DEFAULT_RTOL = 1e-15
MAX_WINDOW = 64


class KernelValue(NamedTuple):
    value: complex
    bound: float
    window: int


def _check_args(d, tau):
    if int(d) != d or d < 1 or d % 2 == 0:
        raise DomainError(f"dim must be odd, got {d!r}")
    if not (math.isfinite(tau) and tau > 0):
        raise DomainError(f"tau must be positive, got {tau!r}")


def reduce_angle(theta):
    """Map theta into 0 <= Re <= pi using 2 pi periodicity and evenness."""
    theta = np.asarray(theta, dtype=complex)
    theta = theta - TWO_PI * np.round(theta.real / TWO_PI)
    return np.where(theta.real < 0, -theta, theta)


def _evaluate(d, tau, theta, window, theta_switch, order, principal, lattice):
    """One pass at a fixed window; returns (value, bound) arrays."""
    value = np.zeros(theta.shape, dtype=complex)
    bound = np.zeros(theta.shape)
    near0 = np.abs(theta) < theta_switch
    nearpi = ~near0 & (np.abs(theta - math.pi) < min(theta_switch, tau))
    direct = ~(near0 | nearpi)
    rep = kernel_representation(d, tau, window)
    if np.any(direct):
        keep = (lambda n: (principal and n == 0) or (lattice and n != 0))
        sub = rep if (principal and lattice) else rep.restrict(keep)
        value[direct] = sub.evaluate(theta[direct])
        if lattice:
            bound[direct] = rep.truncation_bound(theta[direct])
    if np.any(near0):
        c = reduced_series(d, tau, "zero", window, order, principal, lattice)
        value[near0] = series_value(d, tau, theta[near0], c)
        if lattice:
            # individual lattice monomials are singular at 0; bound them on the seam
            bound[near0] = rep.truncation_bound(theta_switch + 1j * theta[near0].imag)
    if np.any(nearpi):
        if not (lattice and principal):
            raise DomainError("principal part and remainder have a pole at theta = pi")
        c = reduced_series(d, tau, "pi", window, order)
        value[nearpi] = series_value(d, tau, math.pi - theta[nearpi], c)
        bound[nearpi] = rep.truncation_bound(math.pi - theta_switch + 1j * theta[nearpi].imag)
    return value, bound


def eval_kernel_with_bound(
    d: int,
    tau: float,
    theta,
    *,
    window: int = DEFAULT_WINDOW,
    theta_max_im: float = DEFAULT_THETA_MAX_IM,
    theta_switch: float = DEFAULT_THETA_SWITCH,
    order: int = DEFAULT_SERIES_ORDER,
    rtol: float = DEFAULT_RTOL,
    principal: bool = True,
    lattice: bool = True,
) -> KernelValue:
    """Kernel value, certified bound on the dropped lattice terms, and the window used.

    The window grows by two until the bound is below ``rtol`` times the value.
    ``principal``/``lattice`` select the n = 0 term and the n != 0 terms; the
    defaults give the full kernel.
    """
    _check_args(d, tau)
    scalar = np.ndim(theta) == 0
    raw = np.asarray(theta, dtype=complex)
    if np.any(np.abs(raw.imag) > theta_max_im):
        raise TruncationError(
            f"|Im theta| = {float(np.max(np.abs(raw.imag)))!r} exceeds the certified strip {theta_max_im!r}"
        )
    th = reduce_angle(raw) if (lattice and principal) else raw
    n = window
    while True:
        value, bound = _evaluate(d, tau, np.atleast_1d(th), n, theta_switch, order, principal, lattice)
        if np.all(bound <= rtol * np.abs(value)) or not lattice:
            break
        if n >= MAX_WINDOW:
            raise TruncationError(f"lattice window {n} cannot certify rtol = {rtol!r} at tau = {tau!r}")
        n += 2
    if scalar:
        return KernelValue(complex(value[0]), float(bound[0]), n)
    return KernelValue(value.reshape(raw.shape), bound.reshape(raw.shape), n)


def eval_kernel(d: int, tau: float, theta, **kwargs):
    """Analytically continued heat kernel ``rho_tau^d(theta)`` on the unit S^d (odd d)."""
    return eval_kernel_with_bound(d, tau, theta, **kwargs).value


def normalization_integral(d: int, tau: float) -> float:
    """Total mass ``int_0^pi rho(theta) vol(S^(d-1)) sin^(d-1)(theta) dtheta``; should be 1."""
    _check_args(d, tau)
    if not 0.01 <= tau <= 2.0:
        raise DomainError(f"normalization check supports tau in [0.01, 2], got {tau!r}")
    shell = float(sphere_volume(d - 1))

    def integrand(t):
        return eval_kernel(d, tau, t).real * shell * math.sin(t) ** (d - 1)

    # split at the bulk of the mass so quad resolves the peak for small tau
    edges = sorted({0.0, min(math.pi, 4 * math.sqrt(tau)), math.pi})
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, err, *info = integrate.quad(integrand, lo, hi, epsabs=1e-14, epsrel=1e-13,
                                         limit=200, full_output=True)
        if len(info) > 1 and err > 1e-10:
            raise QuadratureError(f"quadrature failed on [{lo}, {hi}]: {info[1]}")
        total += val
    return total
