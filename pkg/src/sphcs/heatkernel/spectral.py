"""Eigenfunction expansion of the sphere heat kernel, used as an oracle.

    rho_tau^d(theta) = sum_l exp(-tau l(l+d-1)/2) * dim(H_l) / vol(S^d)
                       * C_l^nu(cos theta) / C_l^nu(1),     nu = (d-1)/2

evaluated in mpmath. At small tau and large |theta| the partial sums cancel
by many orders of magnitude, so the working precision is raised until the
cancellation depth is covered.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath

from ..errors import DomainError, OracleUnavailableError

MAX_DEGREE = 20000
MAX_DPS = 4000


@dataclass(frozen=True)
class SpectralSeries:
    dim: int
    l_max: int
    tau: float
    dps: int = 30


def _multiplicity(d: int, l: int):
    if d == 1:
        return 1 if l == 0 else 2
    return mpmath.mpf(2 * l + d - 1) * mpmath.binomial(l + d - 2, l) / (d - 1)


def sphere_volume(d: int):
    """Riemannian volume of the unit S^d (S^0 is two points)."""
    return 2 * mpmath.pi ** (mpmath.mpf(d + 1) / 2) / mpmath.gamma(mpmath.mpf(d + 1) / 2)


def _partial_sum(d, tau, x, im_abs, stop_digits):
    """Sum until the term envelope drops ``stop_digits`` below the largest term."""
    nu = mpmath.mpf(d - 1) / 2
    vol = sphere_volume(d)
    total = mpmath.mpc(0)
    biggest = mpmath.mpf(0)
    c_prev, c_cur = mpmath.mpf(1), x
    l = 0
    while True:
        c_l = mpmath.mpf(1) if l == 0 else c_cur
        term = mpmath.exp(-tau * l * (l + d - 1) / 2) * _multiplicity(d, l) / vol * c_l
        total += term
        biggest = max(biggest, abs(term))
        envelope = (
            mpmath.exp(-tau * l * (l + d - 1) / 2 + im_abs * l) * _multiplicity(d, l) / vol
        )
        if l > 2 and envelope < biggest * mpmath.mpf(10) ** (-stop_digits):
            return total, biggest, l
        if l >= MAX_DEGREE:
            raise OracleUnavailableError(f"spectral series needs degree > {MAX_DEGREE} at tau = {tau}")
        if l >= 1:
            # normalised Gegenbauer recurrence: (l + 2nu) c_{l+1} = 2(l + nu) x c_l - l c_{l-1}
            c_next = (2 * (l + nu) * x * c_cur - l * c_prev) / (l + 2 * nu)
            c_prev, c_cur = c_cur, c_next
        l += 1


def spectral_kernel(d: int, tau: float, theta, rtol: float = 1e-15) -> complex:
    """Heat kernel on the unit S^d from its Gegenbauer expansion, to relative accuracy ``rtol``."""
    if int(d) != d or d < 1 or d % 2 == 0:
        raise DomainError(f"dim must be odd, got {d!r}")
    if not tau > 0:
        raise DomainError(f"tau must be positive, got {tau!r}")
    theta = complex(theta)
    want = -math.log10(rtol) + 3
    dps = 30
    while dps <= MAX_DPS:
        with mpmath.workdps(dps):
            t = mpmath.mpf(tau)
            th = mpmath.mpc(theta.real, theta.imag)
            x = mpmath.cos(th)
            total, biggest, l_max = _partial_sum(d, t, x, abs(mpmath.im(th)), dps - 5)
            if total == 0:
                depth = dps
            else:
                depth = float(mpmath.log10(biggest / abs(total)))
            if dps - 8 - max(depth, 0.0) >= want:
                return complex(total)
        dps = int(max(2 * dps, depth + want + 15))
    raise OracleUnavailableError(f"spectral oracle did not converge (tau = {tau}, theta = {theta})")


def spectral_series_info(d: int, tau: float, theta=0.0) -> SpectralSeries:
    """Truncation degree and precision the oracle settles on."""
    theta = complex(theta)
    dps = 30
    with mpmath.workdps(dps):
        x = mpmath.cos(mpmath.mpc(theta.real, theta.imag))
        _, _, l_max = _partial_sum(d, mpmath.mpf(tau), x, abs(theta.imag), dps - 5)
    return SpectralSeries(d, l_max, tau, dps)
