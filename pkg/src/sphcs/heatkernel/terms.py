"""Exact symbolic representation of odd-dimensional sphere heat kernels.

A :class:`GaussianTermSum` is a finite sum of monomials

    coeff * (theta - 2 pi n)^j * sin(theta)^(-m) * cos(theta)^k * exp(-(theta - 2 pi n)^2 / (2 tau))

times a common prefactor. The dimension-raising operator
``-(e^{d tau/2} / (2 pi sin theta)) d/dtheta`` maps this family into itself,
so every odd-dimensional kernel is represented exactly.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..errors import DomainError

TWO_PI = 2.0 * math.pi
DEFAULT_WINDOW = 6


@dataclass(frozen=True)
class Term:
    coeff: complex
    n: int
    j: int
    m: int
    k: int

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.j, self.m, self.k)


def _merge(items) -> tuple[Term, ...]:
    acc: dict[tuple[int, int, int, int], complex] = defaultdict(complex)
    for c, n, j, m, k in items:
        acc[(n, j, m, k)] += c
    return tuple(
        Term(c, n, j, m, k) for (n, j, m, k), c in sorted(acc.items()) if c != 0
    )


def _reduce_cos(terms: tuple[Term, ...]) -> tuple[Term, ...]:
    """Apply ``cos^2 = 1 - sin^2`` where it lowers the number of terms."""
    current = terms
    changed = True
    while changed:
        changed = False
        for t in current:
            if t.k < 2 or t.m < 2:
                continue
            rest = [(u.coeff, u.n, u.j, u.m, u.k) for u in current if u is not t]
            rest.append((t.coeff, t.n, t.j, t.m, t.k - 2))
            rest.append((-t.coeff, t.n, t.j, t.m - 2, t.k - 2))
            candidate = _merge(rest)
            if len(candidate) < len(current):
                current = candidate
                changed = True
                break
    return current


@dataclass(frozen=True)
class GaussianTermSum:
    terms: tuple[Term, ...]
    tau: float
    prefactor: complex
    dim: int = 1
    window: int = DEFAULT_WINDOW

    @property
    def lattice(self) -> list[int]:
        return sorted({t.n for t in self.terms})

    def pattern(self) -> tuple[Term, ...]:
        """The n = 0 terms; every lattice copy repeats this shape."""
        return tuple(t for t in self.terms if t.n == 0)

    def restrict(self, keep) -> "GaussianTermSum":
        return GaussianTermSum(
            tuple(t for t in self.terms if keep(t.n)), self.tau, self.prefactor, self.dim, self.window
        )

    def _evaluate_terms(self, terms, theta, gaussian=True, absolute=False, shift=None):
        theta = np.asarray(theta, dtype=complex)
        sin = np.sin(theta)
        cos = np.cos(theta)
        by_n: dict[int, list[Term]] = defaultdict(list)
        for t in terms:
            by_n[t.n if shift is None else shift].append(t)
        total = np.zeros(theta.shape, dtype=float if absolute else complex)
        for n, group in by_n.items():
            u = theta - TWO_PI * n
            inner = np.zeros_like(total)
            for t in group:
                v = t.coeff * u**t.j * sin ** (-t.m) * cos**t.k
                inner = inner + (np.abs(v) if absolute else v)
            if gaussian:
                g = np.exp(-(u * u) / (2.0 * self.tau))
                inner = inner * (np.abs(g) if absolute else g)
            total = total + inner
        pref = abs(self.prefactor) if absolute else self.prefactor
        return pref * total

    def evaluate(self, theta, gaussian: bool = True):
        """Sum at (complex) ``theta``; ``gaussian=False`` drops the exponential factors."""
        out = self._evaluate_terms(self.terms, theta, gaussian)
        return complex(out) if out.ndim == 0 else out

    def truncation_bound(self, theta, extra: int = 8):
        """Upper estimate of the lattice terms outside the window, summed in absolute value.

        Adds ``|term|`` for ``N < |n| <= N + extra`` and doubles the result to
        cover the super-geometric tail beyond.
        """
        pattern = self.pattern()
        if not pattern:
            return np.zeros(np.shape(theta)) if np.ndim(theta) else 0.0
        total = 0.0
        for n in range(self.window + 1, self.window + extra + 1):
            for s in (n, -n):
                total = total + self._evaluate_terms(pattern, theta, True, True, shift=s)
        return 2.0 * total

    def derivative_over_sin(self) -> "GaussianTermSum":
        """Representation of ``(1/sin theta) d/dtheta`` applied to this sum."""
        inv_tau = 1.0 / self.tau
        items = []
        for t in self.terms:
            c, n, j, m, k = t.coeff, t.n, t.j, t.m, t.k
            if j:
                items.append((c * j, n, j - 1, m + 1, k))
            if m:
                items.append((-c * m, n, j, m + 2, k + 1))
            if k:
                # d/dtheta cos^k = -k cos^(k-1) sin; division by sin cancels it
                items.append((-c * k, n, j, m, k - 1))
            items.append((-c * inv_tau, n, j + 1, m + 1, k))
        terms = _reduce_cos(_merge(items))
        return GaussianTermSum(terms, self.tau, self.prefactor, self.dim, self.window)


def _check(tau: float, window: int) -> None:
    if not (math.isfinite(tau) and tau > 0):
        raise DomainError(f"tau must be positive, got {tau!r}")
    if window < 0:
        raise DomainError(f"lattice window must be >= 0, got {window!r}")


def kernel_d1(tau: float, window: int = DEFAULT_WINDOW) -> GaussianTermSum:
    """Wrapped Gaussian ``(2 pi tau)^(-1/2) sum_{|n| <= window} exp(-(theta - 2 pi n)^2 / 2 tau)``."""
    _check(tau, window)
    terms = tuple(Term(1.0 + 0j, n, 0, 0, 0) for n in range(-window, window + 1))
    return GaussianTermSum(terms, float(tau), (TWO_PI * tau) ** -0.5, 1, window)


def recursion_step(kernel: GaussianTermSum, d: int) -> GaussianTermSum:
    """Kernel on S^(d+2) from the kernel on S^d."""
    if d != kernel.dim:
        raise DomainError(f"kernel represents d = {kernel.dim}, not d = {d}")
    raw = kernel.derivative_over_sin()
    factor = -math.exp(d * kernel.tau / 2.0) / TWO_PI
    return GaussianTermSum(raw.terms, kernel.tau, raw.prefactor * factor, d + 2, kernel.window)


@lru_cache(maxsize=256)
def kernel_representation(d: int, tau: float, window: int = DEFAULT_WINDOW) -> GaussianTermSum:
    """``rho_tau^d`` as a term sum, built by repeated recursion from d = 1."""
    if int(d) != d or d < 1 or d % 2 == 0:
        raise DomainError(f"dim must be odd, got {d!r}")
    k = kernel_d1(tau, window)
    for dd in range(1, d, 2):
        k = recursion_step(k, dd)
    return k
