"""Annihilation operators on the circle in a truncated Fourier basis.

Basis e^{i n phi}, n = -N..N. Position operators X_1 = r cos(phi) and
X_2 = r sin(phi) shift n by one; conjugating with exp(tau n^2 / 2) gives
A_k = e^{-tau J^2/2} X_k e^{tau J^2/2}, whose joint eigenvectors are the
Fourier coefficients of the continued circle heat kernel.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import CutoffError, DomainError
from .geometry import ComplexSpherePoint, PhysicalParams
from .phase_space import classical_label, invert_label

RELIABLE_CUTOFF = 8
TAIL_TOL = 1e-12


@dataclass(frozen=True)
class TruncatedBasis:
    N: int
    tau: float
    r: float = 1.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise DomainError(f"cutoff N must be a positive integer, got {self.N!r}")
        if not self.tau >= 0:
            raise DomainError(f"tau must be non-negative, got {self.tau!r}")
        if not self.r > 0:
            raise DomainError(f"radius must be positive, got {self.r!r}")

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.N, self.N + 1)

    @property
    def size(self) -> int:
        return 2 * self.N + 1

    @property
    def reliable(self) -> bool:
        """Cutoffs below 8 modes are accepted but flagged as degraded."""
        return self.N >= RELIABLE_CUTOFF

    def angular_momentum_squared(self) -> np.ndarray:
        return np.diag(self.modes.astype(float) ** 2)


@dataclass(frozen=True)
class OperatorPair:
    A1: np.ndarray
    A2: np.ndarray
    X1: np.ndarray
    X2: np.ndarray
    edge_weight: float


def position_operators(basis: TruncatedBasis) -> tuple[np.ndarray, np.ndarray]:
    n = basis.size
    up = np.eye(n, k=-1)  # row m = col + 1: e^{i phi} raises the mode
    down = np.eye(n, k=1)
    x1 = (basis.r / 2) * (up + down) + 0j
    x2 = (basis.r / 2j) * (up - down)
    return x1, x2


def build_annihilation(basis: TruncatedBasis) -> OperatorPair:
    """A_k entrywise as (X_k)_{mn} exp(tau (n^2 - m^2)/2).

    ``edge_weight`` is the magnitude (r/2) exp(tau (2N+1)/2) of the dropped
    entries that would feed the edge rows from modes +-(N+1).
    """
    x1, x2 = position_operators(basis)
    n2 = basis.modes.astype(float) ** 2
    weight = np.exp(basis.tau * (n2[None, :] - n2[:, None]) / 2)
    a1 = x1 * weight
    a2 = x2 * weight
    edge = (basis.r / 2) * math.exp(basis.tau * (2 * basis.N + 1) / 2)
    return OperatorPair(a1, a2, x1, x2, edge)


def label_angle(a: ComplexSpherePoint, basis: TruncatedBasis) -> complex:
    """Complex alpha with a = r (cos alpha, sin alpha)."""
    u = (a.a[0] + 1j * a.a[1]) / basis.r
    return -1j * cmath.log(u)


def label_from_angle(alpha: complex, r: float) -> ComplexSpherePoint:
    return ComplexSpherePoint([r * cmath.cos(alpha), r * cmath.sin(alpha)], 1)


def coefficient_tail(alpha: complex, basis: TruncatedBasis) -> float:
    """Largest edge coefficient |psi_{+-N}| relative to the peak."""
    n = basis.modes
    mags = np.exp(-basis.tau * n**2 / 2 + n * complex(alpha).imag)
    return float(max(mags[0], mags[-1]) / mags.max())


def coherent_coefficients(a, basis: TruncatedBasis, strict: bool = True) -> np.ndarray:
    """Fourier coefficients (1/2pi) exp(-tau n^2/2) exp(-i n alpha) of the state labelled by ``a``.

    ``a`` is a ComplexSpherePoint on the complexified circle or the complex
    angle alpha itself.
    """
    alpha = label_angle(a, basis) if isinstance(a, ComplexSpherePoint) else complex(a)
    tail = coefficient_tail(alpha, basis)
    if strict and tail > TAIL_TOL:
        raise CutoffError(
            f"edge coefficient {tail:.3g} exceeds {TAIL_TOL:g}; raise N above {basis.N}"
        )
    n = basis.modes
    return np.exp(-basis.tau * n**2 / 2 - 1j * n * alpha) / (2 * math.pi)


def reconstruct(coeffs: np.ndarray, basis: TruncatedBasis, phi) -> np.ndarray:
    phi = np.asarray(phi, dtype=float)
    return np.exp(1j * np.multiply.outer(phi, basis.modes)) @ coeffs


@dataclass(frozen=True)
class EigenReport:
    res1: float
    res2: float
    sphere_sum: float
    eigenvalues: tuple[complex, complex]
    label: tuple[complex, complex]
    classical: tuple[complex, complex]
    dropped_mass: float


def eigen_residual(a, basis: TruncatedBasis, ops: OperatorPair | None = None, strict: bool = True) -> EigenReport:
    """Residuals ||A_k psi - a_k psi|| / ||psi||, the sphere-sum residual, and eigenvalue checks.

    ``dropped_mass`` is the size of the terms the cutoff removes from the edge
    rows of A_k psi, relative to ||psi||; it accounts for the residual. ``classical`` is the classical complexified label of the phase point that
    ``a`` corresponds to, so the quantum and classical labels can be compared.
    """
    alpha = label_angle(a, basis) if isinstance(a, ComplexSpherePoint) else complex(a)
    label = label_from_angle(alpha, basis.r)
    psi = coherent_coefficients(alpha, basis, strict=strict)
    ops = ops or build_annihilation(basis)
    norm = np.linalg.norm(psi)
    a1, a2 = label.a
    v1, v2 = ops.A1 @ psi, ops.A2 @ psi
    res1 = float(np.linalg.norm(v1 - a1 * psi) / norm)
    res2 = float(np.linalg.norm(v2 - a2 * psi) / norm)
    ss = ops.A1 @ v1 + ops.A2 @ v2 - basis.r**2 * psi
    sphere = float(np.linalg.norm(ss) / norm)
    outside = np.array([-basis.N - 1, basis.N + 1])
    missing = np.exp(-basis.tau * outside**2 / 2 + outside * alpha.imag) / (2 * math.pi)
    dropped = float(ops.edge_weight * np.hypot(*missing) / norm)
    inner = np.vdot(psi, psi)
    eig = (complex(np.vdot(psi, v1) / inner), complex(np.vdot(psi, v2) / inner))

    params = PhysicalParams(1.0, 1.0, 1.0 / (basis.tau * basis.r**2), basis.r) if basis.tau > 0 else None
    if params is not None:
        classical = tuple(complex(c) for c in classical_label(invert_label(label, params), params).a)
    else:
        classical = (complex(a1), complex(a2))
    return EigenReport(res1, res2, sphere, eig, (complex(a1), complex(a2)), classical, dropped)


def commutator_norm(ops: OperatorPair, basis: TruncatedBasis, interior: int | None = None) -> float:
    """Spectral norm of [A_1, A_2] on modes |n| <= interior (default N/2)."""
    interior = basis.N // 2 if interior is None else interior
    comm = ops.A1 @ ops.A2 - ops.A2 @ ops.A1
    keep = np.abs(basis.modes) <= interior
    return float(np.linalg.norm(comm[np.ix_(keep, keep)], 2))
