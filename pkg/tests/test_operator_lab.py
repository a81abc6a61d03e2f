import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sphcs.errors import CutoffError, DomainError
from sphcs.geometry import ComplexSpherePoint
from sphcs.heatkernel import eval_kernel
from sphcs.operator_lab import (
    TruncatedBasis,
    build_annihilation,
    coherent_coefficients,
    commutator_norm,
    eigen_residual,
    label_from_angle,
    reconstruct,
)


def test_basis_validation():
    with pytest.raises(DomainError):
        TruncatedBasis(0, 0.5)
    with pytest.raises(DomainError):
        TruncatedBasis(10, -0.1)
    with pytest.raises(DomainError):
        TruncatedBasis(10, 0.1, r=0.0)
    assert not TruncatedBasis(4, 0.5).reliable
    assert TruncatedBasis(8, 0.5).reliable
    assert TruncatedBasis(8, 0.5).size == 17


def test_zero_tau_gives_position_operators():
    b = TruncatedBasis(10, 0.0, 2.0)
    ops = build_annihilation(b)
    np.testing.assert_array_equal(ops.A1, ops.X1)
    np.testing.assert_array_equal(ops.A2, ops.X2)
    np.testing.assert_allclose(ops.A1, ops.A1.conj().T)
    np.testing.assert_allclose(ops.A2, ops.A2.conj().T)


def test_position_operators_multiply_by_cos_and_sin():
    b = TruncatedBasis(12, 0.0, 1.5)
    x1, x2 = build_annihilation(b).X1, build_annihilation(b).X2
    c = coherent_coefficients(0.4, TruncatedBasis(12, 0.8, 1.5))
    phi = np.linspace(0, 6, 5)
    # interior action of X_k equals pointwise multiplication
    f = reconstruct(c, b, phi)
    np.testing.assert_allclose(reconstruct(x1 @ c, b, phi), 1.5 * np.cos(phi) * f, atol=1e-5)
    np.testing.assert_allclose(reconstruct(x2 @ c, b, phi), 1.5 * np.sin(phi) * f, atol=1e-5)


def test_entry_formula():
    tau, r = 0.5, 1.7
    b = TruncatedBasis(8, tau, r)
    ops = build_annihilation(b)
    for n in range(-8, 8):
        i, j = n + 1 + 8, n + 8
        assert ops.A1[i, j] == pytest.approx(r / 2 * math.exp(-tau * (2 * n + 1) / 2), rel=1e-14)


def test_conjugation_identity():
    b = TruncatedBasis(8, 0.3, 1.0)
    ops = build_annihilation(b)
    e = np.diag(np.exp(0.3 * b.modes.astype(float) ** 2 / 2))
    np.testing.assert_allclose(ops.A1, np.linalg.inv(e) @ ops.X1 @ e, rtol=1e-12)


def test_interior_commutator():
    for r in (1.0, 4.0):
        b = TruncatedBasis(40, 0.5, r)
        assert commutator_norm(build_annihilation(b), b) <= 1e-10 * r * r


def test_coefficients_examples():
    b = TruncatedBasis(20, 1.0)
    c = coherent_coefficients(0.0, b)
    np.testing.assert_allclose(c, np.exp(-b.modes**2 / 2) / (2 * math.pi))
    np.testing.assert_array_equal(c, c[::-1])
    c = coherent_coefficients(0.3 + 0.2j, b)
    np.testing.assert_allclose(np.abs(c), np.exp(-b.modes**2 / 2 + 0.2 * b.modes) / (2 * math.pi), rtol=1e-14)


@pytest.mark.parametrize("alpha", [0.0, 0.3 + 0.2j, -1.2 - 0.25j])
def test_reconstruction_matches_kernel(alpha):
    b = TruncatedBasis(40, 0.5)
    phi = np.linspace(0, 2 * math.pi, 9)
    got = reconstruct(coherent_coefficients(alpha, b), b, phi)
    np.testing.assert_allclose(got, eval_kernel(1, 0.5, phi - alpha), rtol=1e-12, atol=1e-14)


def test_cutoff_error():
    with pytest.raises(CutoffError, match="raise N"):
        coherent_coefficients(3.0j, TruncatedBasis(10, 0.5))
    coherent_coefficients(3.0j, TruncatedBasis(10, 0.5), strict=False)


def test_label_point_uses_complex_sphere():
    a = label_from_angle(0.5 + 0.3j, 2.0)
    assert isinstance(a, ComplexSpherePoint)
    assert a.square == pytest.approx(4.0, rel=1e-15)
    b = TruncatedBasis(40, 0.5, 2.0)
    # passing the point or the angle gives the same state
    np.testing.assert_allclose(coherent_coefficients(a, b), coherent_coefficients(0.5 + 0.3j, b), rtol=1e-13)


def test_eigen_residual_examples():
    b = TruncatedBasis(40, 0.5)
    ops = build_annihilation(b)
    real = eigen_residual(0.5, b, ops)
    assert max(real.res1, real.res2) <= 1e-10
    cplx = eigen_residual(0.5 + 0.3j, b, ops)
    assert max(cplx.res1, cplx.res2) <= 1e-8
    assert real.sphere_sum <= 1e-10 and cplx.sphere_sum <= 1e-10


@settings(max_examples=40, deadline=None)
@given(st.floats(-math.pi, math.pi), st.floats(-0.3, 0.3), st.floats(0.5, 5.0))
def test_eigenvalue_matches_label(re, im, r):
    b = TruncatedBasis(40, 0.5, r)
    rep = eigen_residual(complex(re, im), b)
    np.testing.assert_allclose(rep.eigenvalues, rep.label, atol=1e-8 * r)
    np.testing.assert_allclose(rep.classical, rep.label, atol=1e-8 * r)


def test_residual_shrinks_with_cutoff():
    alpha = 0.4 + 0.2j
    small = eigen_residual(alpha, TruncatedBasis(30, 0.05), strict=False)
    big = eigen_residual(alpha, TruncatedBasis(60, 0.05), strict=False)
    assert big.res1 < small.res1 and big.res2 < small.res2


def test_dropped_mass_explains_residual():
    for n, tau in ((4, 0.5), (6, 0.2), (30, 0.05)):
        rep = eigen_residual(0.3 + 0.1j, TruncatedBasis(n, tau), strict=False)
        assert rep.dropped_mass == pytest.approx(rep.res1, rel=1e-6)
