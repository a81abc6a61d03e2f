"""Sphere coherent states near the north pole and their flat Gaussian limit."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .geometry import PhysicalParams, complex_angle, embed_momentum, embed_position
from .heatkernel import eval_kernel
from .phase_space import classical_label_arrays


@dataclass(frozen=True)
class FlatLabel:
    """Flat phase-space data (x0, p0) and the complex centre z = x0 + i p0/(m omega)."""

    x0: np.ndarray
    p0: np.ndarray
    m_omega: float = 1.0

    def __post_init__(self):
        x0 = np.array(self.x0, dtype=float).ravel()
        p0 = np.array(self.p0, dtype=float).ravel()
        if x0.shape != p0.shape:
            raise ValueError("x0 and p0 must have the same length")
        object.__setattr__(self, "x0", x0)
        object.__setattr__(self, "p0", p0)

    @classmethod
    def for_params(cls, x0, p0, params: PhysicalParams) -> "FlatLabel":
        return cls(x0, p0, params.m_omega)

    @property
    def dim(self) -> int:
        return self.x0.size

    @property
    def z(self) -> np.ndarray:
        return self.x0 + 1j * self.p0 / self.m_omega


def _squeeze(val):
    return complex(val) if np.ndim(val) == 0 else val


def sphere_label(label: FlatLabel, params: PhysicalParams) -> np.ndarray:
    xt0 = embed_position(label.x0, params)
    pt0 = embed_momentum(label.x0, label.p0, params)
    return classical_label_arrays(xt0, pt0, params)


def coherent_angle(label: FlatLabel, x, params: PhysicalParams):
    a = sphere_label(label, params)
    return complex_angle(a, embed_position(x, params), params)


def coherent_state(label: FlatLabel, x, params: PhysicalParams):
    """psi_a(x~) for the label lifted from (x0, p0); ``x`` has shape ``(..., d)``."""
    theta = coherent_angle(label, x, params)
    return _squeeze(eval_kernel(label.dim, params.tau, theta))


def gaussian_limit(label: FlatLabel, x, params: PhysicalParams):
    """(m omega / 2 pi hbar)^(d/2) exp(-(z - x)^2 / (2 hbar / m omega)) with a complex square."""
    x = np.asarray(x, dtype=float)
    mw = params.m_omega
    dz = label.z - x
    sq = np.sum(dz * dz, axis=-1)
    return _squeeze((mw / (2 * math.pi * params.hbar)) ** (label.dim / 2) * np.exp(-sq * mw / (2 * params.hbar)))


def gaussian_alt(label: FlatLabel, x, params: PhysicalParams):
    """The same Gaussian as a real envelope centred at x0 times a plane wave."""
    x = np.asarray(x, dtype=float)
    hbar, mw = params.hbar, params.m_omega
    p0, x0 = label.p0, label.x0
    c_z = np.exp(-1j * (p0 @ x0) / hbar) * np.exp((p0 @ p0) / (2 * hbar * mw))
    dx = x - x0
    envelope = np.exp(-np.sum(dx * dx, axis=-1) * mw / (2 * hbar))
    phase = np.exp(1j * (x @ p0) / hbar)
    return _squeeze(c_z * (mw / (2 * math.pi * hbar)) ** (label.dim / 2) * envelope * phase)


def cube_grid(center, side: float, points: int) -> np.ndarray:
    """Product grid of ``points`` per axis on a cube of given side; shape (points^d, d)."""
    center = np.asarray(center, dtype=float)
    axis = np.linspace(-side / 2, side / 2, points)
    mesh = np.meshgrid(*([axis] * center.size), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1) + center


def default_grid(label: FlatLabel, params: PhysicalParams, points: int = 9) -> np.ndarray:
    return cube_grid(label.x0, 4 * math.sqrt(params.hbar / params.m_omega), points)


@dataclass(frozen=True)
class LimitRow:
    r: float
    tau: float
    max_abs_err: float
    fitted_slope_so_far: float


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    if len(xs) < 2:
        return math.nan
    slope, _ = np.polyfit(np.log(xs), np.log(ys), 1)
    return float(slope)


def limit_error_study(
    label: FlatLabel, x_grid, r_sequence: Sequence[float], params_base: PhysicalParams
) -> list[LimitRow]:
    """max over the grid of |r^-d psi - gaussian_limit| along the radius sequence."""
    x_grid = np.asarray(x_grid, dtype=float)
    rows: list[LimitRow] = []
    rs, errs = [], []
    for r in r_sequence:
        params = params_base.with_radius(float(r))
        psi = np.asarray(coherent_state(label, x_grid, params))
        target = np.asarray(gaussian_limit(label, x_grid, params))
        err = float(np.max(np.abs(psi * float(r) ** (-label.dim) - target)))
        rs.append(float(r))
        errs.append(err)
        rows.append(LimitRow(float(r), params.tau, err, loglog_slope(rs, errs)))
    return rows


@dataclass(frozen=True)
class WidthResult:
    widths: np.ndarray
    mean: np.ndarray
    warnings: tuple[str, ...] = field(default=())

    @property
    def width(self) -> float:
        return float(np.mean(self.widths))


def measure_width(label: FlatLabel, params: PhysicalParams, x_grid) -> WidthResult:
    """Per-axis standard deviation of the sampled density |r^-d psi|^2."""
    x_grid = np.asarray(x_grid, dtype=float)
    psi = np.asarray(coherent_state(label, x_grid, params)) * params.radius ** (-label.dim)
    w = np.abs(psi) ** 2
    total = w.sum()
    mean = (w[:, None] * x_grid).sum(axis=0) / total
    var = (w[:, None] * (x_grid - mean) ** 2).sum(axis=0) / total
    widths = np.sqrt(var)

    warnings = []
    lo, hi = x_grid.min(axis=0), x_grid.max(axis=0)
    on_edge = np.any(np.isclose(x_grid, lo) | np.isclose(x_grid, hi), axis=1)
    if w[on_edge].max() > 1e-6 * w.max():
        warnings.append("grid too narrow: density at the boundary exceeds 1e-6 of the peak")
    for k in range(x_grid.shape[1]):
        vals = np.unique(x_grid[:, k])
        if vals.size > 1 and np.max(np.diff(vals)) > widths[k]:
            warnings.append(f"grid too coarse on axis {k}: spacing exceeds the measured width")
    return WidthResult(widths, mean, tuple(warnings))
