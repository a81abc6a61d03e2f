"""Even power series of the kernel around theta = 0 and theta = pi.

Near both points the term sum is a ratio of quantities that vanish
together, so it is evaluated from a Maclaurin expansion instead. Writing

    rho^d(c + phi) = (2 pi tau)^(-d/2) exp(-phi^2 / 2 tau) * chi_d(phi)

with c in {0, pi}, chi_d is even and entire in phi and obeys

    chi_{d+2} = sign * e^{d tau/2} (phi chi_d - tau chi_d') / sin(phi)

with sign = +1 at the origin and -1 at the antipode. Series are stored as
coefficient arrays in t = phi^2.
"""

from __future__ import annotations

import math

import numpy as np

DEFAULT_SERIES_ORDER = 40


def _sin_over_phi(count: int) -> np.ndarray:
    return np.array([(-1) ** i / math.factorial(2 * i + 1) for i in range(count)])


def _divide(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    out = np.zeros(len(num), dtype=num.dtype)
    for i in range(len(num)):
        acc = num[i] - np.dot(out[:i][::-1], den[1 : i + 1])
        out[i] = acc / den[0]
    return out


def _cosh_lattice(tau: float, centers, count: int) -> np.ndarray:
    """Taylor coefficients (in phi^2) of ``sum_c 2 exp(-c^2/2tau) cosh(c phi / tau)``."""
    coeffs = np.zeros(count)
    for c in centers:
        log_w = -(c * c) / (2.0 * tau)
        log_b = math.log(c / tau)
        for i in range(count):
            coeffs[i] += 2.0 * math.exp(log_w + 2 * i * log_b - math.lgamma(2 * i + 1))
    return coeffs


def base_series(tau: float, center: str, window: int, include_principal: bool = True,
                include_lattice: bool = True, count: int = 32) -> np.ndarray:
    """chi_1 around ``center`` ('zero' or 'pi'), truncated to ``count`` coefficients."""
    coeffs = np.zeros(count)
    if center == "zero":
        if include_principal:
            coeffs[0] = 1.0
        if include_lattice:
            coeffs += _cosh_lattice(tau, [2 * math.pi * n for n in range(1, window + 1)], count)
    elif center == "pi":
        # lattice points at odd multiples of pi; all of them are "off-centre"
        coeffs += _cosh_lattice(tau, [math.pi * (2 * n - 1) for n in range(1, window + 2)], count)
    else:
        raise ValueError(center)
    return coeffs


def raise_dimension(coeffs: np.ndarray, tau: float, d: int, sign: float) -> np.ndarray:
    """chi_d -> chi_{d+2}; the result is one coefficient shorter."""
    i = np.arange(len(coeffs) - 1)
    odd = coeffs[:-1] - 2.0 * tau * (i + 1) * coeffs[1:]
    return sign * math.exp(d * tau / 2.0) * _divide(odd, _sin_over_phi(len(odd)))


def reduced_series(d: int, tau: float, center: str, window: int, order: int = DEFAULT_SERIES_ORDER,
                   include_principal: bool = True, include_lattice: bool = True) -> np.ndarray:
    """chi_d coefficients, accurate through phi^order."""
    steps = (d - 1) // 2
    count = order // 2 + 1 + steps
    coeffs = base_series(tau, center, window, include_principal, include_lattice, count)
    sign = 1.0 if center == "zero" else -1.0
    for dd in range(1, d, 2):
        coeffs = raise_dimension(coeffs, tau, dd, sign)
    return coeffs


def horner(coeffs: np.ndarray, t):
    out = np.zeros(np.shape(t), dtype=complex) + coeffs[-1]
    for c in coeffs[-2::-1]:
        out = out * t + c
    return out


def series_value(d: int, tau: float, phi, coeffs: np.ndarray, gaussian: bool = True):
    phi = np.asarray(phi, dtype=complex)
    t = phi * phi
    val = horner(coeffs, t) * (2.0 * math.pi * tau) ** (-d / 2.0)
    if gaussian:
        val = val * np.exp(-t / (2.0 * tau))
    return val
