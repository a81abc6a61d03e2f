"""Principal part, remainder and the small-tau limit of the sphere heat kernel.

The principal part ``P_d`` keeps only the n = 0 lattice term of the
kernel; the remainder ``R_d = rho - P_d`` collects the rest and is
exponentially small in 1/tau on a disc around theta = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, WindowError
from .heatkernel import eval_kernel_with_bound, kernel_representation, reduced_series
from .heatkernel.evaluate import DEFAULT_THETA_SWITCH
from .heatkernel.series import DEFAULT_SERIES_ORDER, horner
from .heatkernel.terms import GaussianTermSum

WINDOW_SHRINK = 0.9
FIRST_WINDOW = math.pi / 2


def window_radius(d: int, shrink: float = WINDOW_SHRINK) -> float:
    """s_d: pi/2 for d = 1, multiplied by ``shrink`` at each step up in dimension."""
    _check_dim(d)
    return FIRST_WINDOW * shrink ** ((d - 1) // 2)


def _check_dim(d):
    if int(d) != d or d < 1 or d % 2 == 0:
        raise DomainError(f"dim must be odd, got {d!r}")


@dataclass(frozen=True)
class PrincipalPart:
    """The n = 0 term of the kernel, ``(2 pi tau)^(-d/2) exp(-theta^2/2tau) g_d(theta)``."""

    terms: GaussianTermSum
    dim: int
    tau: float
    theta_switch: float = DEFAULT_THETA_SWITCH

    def __call__(self, theta):
        return eval_kernel_with_bound(
            self.dim, self.tau, theta, theta_switch=self.theta_switch, lattice=False
        ).value

    def ratio_to_flat(self, theta):
        """g_d(theta) = P_d / ((2 pi tau)^(-d/2) exp(-theta^2/2tau)), free of under/overflow."""
        theta = np.asarray(theta, dtype=complex)
        out = np.empty(theta.shape, dtype=complex)
        near = np.abs(theta) < self.theta_switch
        if np.any(near):
            c = reduced_series(self.dim, self.tau, "zero", 0, DEFAULT_SERIES_ORDER, True, False)
            out[near] = horner(c, theta[near] * theta[near])
        if np.any(~near):
            scale = (2 * math.pi * self.tau) ** (self.dim / 2)
            out[~near] = np.asarray(self.terms.evaluate(theta[~near], gaussian=False)) * scale
        return complex(out) if out.ndim == 0 else out


def principal_part(d: int, tau: float) -> PrincipalPart:
    _check_dim(d)
    if not tau > 0:
        raise DomainError(f"tau must be positive, got {tau!r}")
    return PrincipalPart(kernel_representation(d, float(tau), 0), d, float(tau))


def remainder(d: int, tau: float, theta, s: float | None = None):
    """R_d(tau, theta) = rho - P_d, summed directly from the n != 0 lattice terms.

    Summing the off-centre terms avoids the cancellation of forming
    ``rho - P_d`` when R_d is many orders below P_d.
    """
    s = window_radius(d) if s is None else s
    if np.any(np.abs(np.asarray(theta)) >= s):
        raise WindowError(f"|theta| must be below s_{d} = {s!r}")
    return eval_kernel_with_bound(d, tau, theta, principal=False).value


def flat_gaussian(d: int, tau: float, theta):
    """Flat comparator ``(2 pi tau)^(-d/2) exp(-theta^2/2tau)``."""
    theta = np.asarray(theta, dtype=complex)
    val = (2 * math.pi * tau) ** (-d / 2) * np.exp(-(theta * theta) / (2 * tau))
    return complex(val) if val.ndim == 0 else val


def jacobian_ratio(d: int, theta):
    """(theta / sin theta)^((d-1)/2); integer power since d is odd."""
    _check_dim(d)
    theta = np.asarray(theta, dtype=complex)
    if np.any(np.abs(theta) >= math.pi):
        raise DomainError("jacobian_ratio has poles at theta = +-pi; need |theta| < pi")
    t2 = theta * theta
    small = np.abs(theta) < 1e-3
    safe = np.where(small, 1.0, theta)
    base = np.where(small, 1 + t2 / 6 + 7 * t2 * t2 / 360, safe / np.sin(safe))
    val = base ** ((d - 1) // 2)
    return complex(val) if val.ndim == 0 else val


@dataclass(frozen=True)
class RatioRow:
    tau: float
    max_err: float


def principal_ratio_limit_study(
    d: int, theta_grid, tau_sequence: Sequence[float], s: float | None = None
) -> list[RatioRow]:
    """max over the grid of |P_d / flat_gaussian - jacobian_ratio| for each tau."""
    grid = np.asarray(theta_grid, dtype=complex).ravel()
    s = window_radius(d) if s is None else s
    if np.any(np.abs(grid) >= s):
        raise WindowError(f"theta grid leaves the window |theta| < {s!r}")
    target = jacobian_ratio(d, grid)
    rows = []
    for tau in tau_sequence:
        g = principal_part(d, tau).ratio_to_flat(grid)
        rows.append(RatioRow(float(tau), float(np.max(np.abs(g - target)))))
    return rows


@dataclass(frozen=True)
class ExponentialFit:
    rate: float
    amplitude: float
    r_squared: float


def fit_exponential_rate(taus: Sequence[float], values: Sequence[float]) -> ExponentialFit:
    """Least-squares fit of ``log|v| = log B - C / tau``."""
    taus = np.asarray(taus, dtype=float)
    logs = np.log(np.abs(np.asarray(values, dtype=complex)))
    if len(taus) < 2:
        raise DomainError("need at least two tau values")
    u = 1.0 / taus
    slope, intercept = np.polyfit(u, logs, 1)
    resid = logs - (slope * u + intercept)
    ss_tot = float(np.sum((logs - logs.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return ExponentialFit(float(-slope), float(math.exp(intercept)), r2)


@dataclass(frozen=True)
class RemainderRow:
    tau: float
    abs_r: float
    fitted_c: float
    fitted_b: float


def remainder_study(d: int, theta, taus: Sequence[float]) -> list[RemainderRow]:
    """|R_d| per tau with the running fit over the rows so far (NaN on the first row)."""
    taus = [float(t) for t in taus]
    if len(taus) < 2:
        raise DomainError("need at least two tau values")
    values = [abs(remainder(d, t, theta)) for t in taus]
    rows = []
    for i, (t, v) in enumerate(zip(taus, values)):
        if i == 0:
            rows.append(RemainderRow(t, v, math.nan, math.nan))
        else:
            fit = fit_exponential_rate(taus[: i + 1], values[: i + 1])
            rows.append(RemainderRow(t, v, fit.rate, fit.amplitude))
    return rows
