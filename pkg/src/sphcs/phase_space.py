"""The classical complexifier map (x, p) -> a(x, p) on T*(S^d).

``classical_label`` is the closed form, ``invert_label`` its inverse, and
``bracket_series_oracle`` an independent check that sums the nested
Poisson-bracket series with finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .geometry import CONSTRAINT_RTOL, ComplexSpherePoint, PhasePoint, PhysicalParams

SMALL_ETA = 1e-4


def _sinh_over(eta):
    """sinh(eta)/eta with the removable singularity at 0."""
    eta = np.asarray(eta, dtype=float)
    small = eta < SMALL_ETA
    safe = np.where(small, 1.0, eta)
    e2 = eta * eta
    return np.where(small, 1.0 + e2 / 6.0 + e2 * e2 / 120.0, np.sinh(safe) / safe)


def classical_label_arrays(x, p, params: PhysicalParams) -> np.ndarray:
    """Vectorised ``a = cosh(eta) x + i (r^2/j) sinh(eta) p`` with ``eta = j/(m omega r^2)``.

    ``x`` and ``p`` have shape ``(..., d+1)``. With ``j = r |p|`` the second
    coefficient is ``sinh(eta)/(m omega eta)``, finite at ``p = 0``.
    """
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    pnorm = np.linalg.norm(p, axis=-1)
    eta = pnorm / (params.m_omega * params.radius)
    c_x = np.cosh(eta)[..., None]
    c_p = (_sinh_over(eta) / params.m_omega)[..., None]
    return c_x * x + 1j * c_p * p


def classical_label(point: PhasePoint, params: PhysicalParams) -> ComplexSpherePoint:
    point.check(params)
    return ComplexSpherePoint(classical_label_arrays(point.x, point.p, params), point.dim)


def invert_label(a: ComplexSpherePoint, params: PhysicalParams) -> PhasePoint:
    """Recover the phase point whose complexified label is ``a``.

    ``|Re a| = r cosh(rho)`` and ``|Im a| = r sinh(rho)`` with
    ``rho = |p|/(m omega r)``; rho is read from the sinh relation, which
    stays well conditioned as p -> 0.
    """
    a.check(params)
    r = params.radius
    re, im = a.a.real.copy(), a.a.imag.copy()
    re_norm = float(np.linalg.norm(re))
    if re_norm < r * (1.0 - CONSTRAINT_RTOL):
        raise DomainError(f"|Re a| = {re_norm!r} < r = {r!r}: label has no real preimage")
    im_norm = float(np.linalg.norm(im))
    rho = math.asinh(im_norm / r)
    x = re / math.cosh(rho)
    if rho == 0.0:
        p = np.zeros_like(re)
    else:
        pmag = params.m_omega * r * rho
        p = im * (pmag / (r * math.sinh(rho)))
    # project out rounding so the PhasePoint invariants hold tightly
    x *= r / np.linalg.norm(x)
    p -= (p @ x) / (r * r) * x
    return PhasePoint(x, p, a.dim)


@dataclass(frozen=True)
class ComplexifierSeriesTruncation:
    order: int = 3
    fd_step: float = 1e-4

    def __post_init__(self):
        if int(self.order) != self.order or not 0 <= self.order <= 4:
            raise DomainError(f"order must be an integer in [0, 4], got {self.order!r}")
        if not 1e-6 <= self.fd_step <= 1e-3:
            raise DomainError(f"fd_step must lie in [1e-6, 1e-3], got {self.fd_step!r}")


def _angular_momentum_sq(z, n1):
    x, p = z[..., :n1], z[..., n1:]
    xp = np.sum(x * p, axis=-1)
    return np.sum(x * x, axis=-1) * np.sum(p * p, axis=-1) - xp * xp


def _nested_bracket(order, z, steps, n1):
    """``{...{x, j^2}, ..., j^2}`` (``order`` brackets) at ambient points ``z``.

    Both gradients in each canonical bracket come from central differences
    on T*R^{d+1}; ``z`` has shape ``(..., 2(d+1))``.
    """
    if order == 0:
        return z[..., :n1]
    dim = 2 * n1
    shifts = np.diag(steps)
    stencil = np.concatenate([z[..., None, :] + shifts, z[..., None, :] - shifts], axis=-2)
    f = _nested_bracket(order - 1, stencil, steps, n1)
    g = _angular_momentum_sq(stencil, n1)
    df = (f[..., :dim, :] - f[..., dim:, :]) / (2.0 * steps[:, None])
    dg = (g[..., :dim] - g[..., dim:]) / (2.0 * steps)
    # {f, g} = sum_i df/dx_i dg/dp_i - df/dp_i dg/dx_i
    return np.einsum("...ik,...i->...k", df[..., :n1, :], dg[..., n1:]) - np.einsum(
        "...ik,...i->...k", df[..., n1:, :], dg[..., :n1]
    )


def bracket_series_oracle(
    point: PhasePoint, params: PhysicalParams, trunc: ComplexifierSeriesTruncation
) -> np.ndarray:
    """Partial sum of ``sum_n (i/(2 m omega r^2))^n / n! {...{x_k, j^2}...}`` up to ``trunc.order``."""
    n1 = point.dim + 1
    r = params.radius
    z = np.concatenate([point.x, point.p])
    steps = np.concatenate(
        [np.full(n1, trunc.fd_step * r), np.full(n1, trunc.fd_step * params.m_omega * r)]
    )
    factor = 1j / (2.0 * params.m_omega * r * r)
    total = point.x.astype(complex)
    for n in range(1, trunc.order + 1):
        total = total + factor**n / math.factorial(n) * _nested_bracket(n, z, steps, n1)
    return total
