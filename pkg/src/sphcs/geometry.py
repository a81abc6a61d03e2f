"""Points on the radius-r sphere, its cotangent bundle and its complexification.

Everything is extrinsic: positions live in R^{d+1}, labels in C^{d+1}.
The flat data (x0, p0) of R^d are placed near the north pole
(0, ..., 0, r).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import DomainError, OutOfRegimeError

CONSTRAINT_RTOL = 1e-12
DEFAULT_SMALL_ANGLE_WINDOW = math.pi / 2


@dataclass(frozen=True)
class PhysicalParams:
    """Units for one sphere: hbar, mass, omega, radius and the derived tau."""

    hbar: float = 1.0
    mass: float = 1.0
    omega: float = 1.0
    radius: float = 1.0
    tau: float = field(init=False)

    def __post_init__(self):
        for name in ("hbar", "mass", "omega", "radius"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be a positive finite number, got {value!r}")
        object.__setattr__(
            self, "tau", self.hbar / (self.mass * self.omega * self.radius**2)
        )

    @property
    def m_omega(self) -> float:
        return self.mass * self.omega

    def with_radius(self, radius: float) -> "PhysicalParams":
        return PhysicalParams(self.hbar, self.mass, self.omega, radius)


def _check_odd_dim(dim: int) -> int:
    if int(dim) != dim or dim < 1 or dim % 2 == 0:
        raise DomainError(f"dim must be odd and positive, got {dim!r}")
    return int(dim)


@dataclass(frozen=True)
class PhasePoint:
    """A point (x, p) of T*(S^d): ``|x| = r`` and ``x . p = 0``."""

    x: np.ndarray
    p: np.ndarray
    dim: int

    def __post_init__(self):
        x = np.array(self.x, dtype=float)
        p = np.array(self.p, dtype=float)
        dim = _check_odd_dim(self.dim)
        if x.shape != (dim + 1,) or p.shape != (dim + 1,):
            raise DomainError(f"x and p must have shape ({dim + 1},)")
        x.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "dim", dim)

    @property
    def angular_momentum(self) -> float:
        """j = r |p|, exact on the constraint set."""
        return float(np.linalg.norm(self.x) * np.linalg.norm(self.p))

    def check(self, params: PhysicalParams) -> None:
        r = params.radius
        if abs(self.x @ self.x - r * r) > CONSTRAINT_RTOL * r * r:
            raise DomainError(f"|x| = {np.linalg.norm(self.x)!r} is not the radius {r!r}")
        # rounding in x.p is bounded by sum|x_k p_k|, which unlike |x||p| cannot underflow
        scale = float(np.abs(self.x) @ np.abs(self.p))
        if abs(self.x @ self.p) > CONSTRAINT_RTOL * scale:
            raise DomainError("p is not tangent to the sphere at x")


@dataclass(frozen=True)
class ComplexSpherePoint:
    """A label a in C^{d+1} with a_1^2 + ... + a_{d+1}^2 = r^2."""

    a: np.ndarray
    dim: int

    def __post_init__(self):
        a = np.array(self.a, dtype=complex)
        dim = _check_odd_dim(self.dim)
        if a.shape != (dim + 1,):
            raise DomainError(f"a must have shape ({dim + 1},)")
        a.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "dim", dim)

    @property
    def square(self) -> complex:
        """Complex bilinear square sum(a_k^2) (not the Hermitian norm)."""
        return complex(np.sum(self.a * self.a))

    def check(self, params: PhysicalParams) -> None:
        """Tolerance is relative to the summand size max(r^2, sum |a_k|^2)."""
        r2 = params.radius**2
        scale = max(r2, float(np.sum(np.abs(self.a) ** 2)))
        if abs(self.square - r2) > CONSTRAINT_RTOL * scale:
            raise DomainError(f"sum(a_k^2) = {self.square!r} differs from r^2 = {r2!r}")


def embed_position(x0, params: PhysicalParams) -> np.ndarray:
    """Lift flat positions ``x0`` (shape ``(..., d)``) to ``(x0, sqrt(r^2 - |x0|^2))``."""
    x0 = np.asarray(x0, dtype=float)
    r = params.radius
    sq = np.sum(x0 * x0, axis=-1)
    if np.any(sq > r * r):
        worst = float(np.sqrt(np.max(sq)))
        raise DomainError(f"|x0| = {worst!r} exceeds the sphere radius {r!r}")
    last = np.sqrt(np.maximum(r * r - sq, 0.0))
    return np.concatenate([x0, last[..., None]], axis=-1)


def embed_momentum(x0, p0, params: PhysicalParams) -> np.ndarray:
    """Lift flat momentum ``p0`` at ``x0`` to the tangent vector ``(p0, -p0.x0/sqrt(r^2 - x0^2))``."""
    x0 = np.asarray(x0, dtype=float)
    p0 = np.asarray(p0, dtype=float)
    r = params.radius
    sq = np.sum(x0 * x0, axis=-1)
    if np.any(sq >= r * r):
        worst = float(np.sqrt(np.max(sq)))
        raise DomainError(f"|x0| = {worst!r} must be strictly below the radius {r!r}")
    height = np.sqrt(r * r - sq)
    last = -np.sum(p0 * x0, axis=-1) / height
    return np.concatenate([p0, np.asarray(last)[..., None]], axis=-1)


def complex_angle(a, x, params: PhysicalParams):
    """Principal complex angle between a label ``a`` and sphere points ``x``.

    Solves ``cos(theta) = a.x / r^2`` with ``0 <= Re(theta) <= pi``. Uses
    ``1 - cos(theta) = (a - x)^2 / (2 r^2)``, valid because both ``a.a`` and
    ``x.x`` equal ``r^2``; this avoids the cancellation in ``1 - a.x/r^2``
    when the angle is small. On the imaginary axis ``Im(theta) >= 0``.

    ``x`` may carry leading batch axes; the result then has that shape.
    """
    a = np.asarray(getattr(a, "a", a), dtype=complex)
    x = np.asarray(x, dtype=float)
    diff = a - x
    half_chord = np.sqrt(np.sum(diff * diff, axis=-1) + 0j) / (2.0 * params.radius)
    theta = 2.0 * np.arcsin(half_chord)
    # arcsin has a branch cut on the real axis beyond 1; fold back into Re in [0, pi]
    theta = np.where(theta.real < 0, -theta, theta)
    if np.ndim(theta) == 0:
        return complex(theta)
    return theta


class SmallAngle(NamedTuple):
    theta: complex
    theta_sq: complex
    flat_part: complex
    defect: complex


def small_angle_decomposition(
    x0, p0, x, params: PhysicalParams, s: float = DEFAULT_SMALL_ANGLE_WINDOW
) -> SmallAngle:
    """Small root of ``cos(theta) = a(x0~, p0~).x~ / r^2`` and its split into flat part plus defect.

    ``flat_part = (z - x)^2 / r^2`` with ``z = x0 + i p0 / (m omega)`` and
    ``defect = theta^2 - flat_part``. The root is fixed only up to sign;
    the one with ``Re(theta) >= 0`` is returned. ``x`` may be batched.
    """
    from .phase_space import classical_label_arrays

    if not 0 < s < math.pi:
        raise DomainError(f"window s must lie in (0, pi), got {s!r}")
    x0 = np.asarray(x0, dtype=float)
    p0 = np.asarray(p0, dtype=float)
    x = np.asarray(x, dtype=float)
    xt0 = embed_position(x0, params)
    pt0 = embed_momentum(x0, p0, params)
    xt = embed_position(x, params)
    a = classical_label_arrays(xt0, pt0, params)
    theta = np.asarray(complex_angle(a, xt, params))
    if np.any(np.abs(theta) >= s):
        raise OutOfRegimeError(
            f"no root with |theta| < {s!r} at r = {params.radius!r}; increase r or s"
        )
    theta_sq = theta * theta
    z = x0 + 1j * p0 / params.m_omega
    dz = z - x
    flat = np.sum(dz * dz, axis=-1) / params.radius**2
    defect = theta_sq - flat
    if theta.ndim == 0:
        return SmallAngle(complex(theta), complex(theta_sq), complex(flat), complex(defect))
    return SmallAngle(theta, theta_sq, flat, defect)
