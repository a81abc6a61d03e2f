import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sphcs.errors import DomainError, OutOfRegimeError
from sphcs.geometry import (
    ComplexSpherePoint,
    PhasePoint,
    PhysicalParams,
    complex_angle,
    embed_momentum,
    embed_position,
    small_angle_decomposition,
)
from sphcs.heatkernel import eval_kernel
from sphcs.phase_space import classical_label_arrays

finite = st.floats(-1.0, 1.0, allow_nan=False)


def test_tau_is_derived_exactly():
    p = PhysicalParams(1.3, 0.7, 2.1, 5.5)
    assert p.tau == 1.3 / (0.7 * 2.1 * 5.5**2)
    assert p.with_radius(2.0).tau == 1.3 / (0.7 * 2.1 * 4.0)


@pytest.mark.parametrize("field", ["hbar", "mass", "omega", "radius"])
@pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
def test_params_reject_nonpositive(field, bad):
    kwargs = dict(hbar=1.0, mass=1.0, omega=1.0, radius=1.0)
    kwargs[field] = bad
    with pytest.raises(DomainError):
        PhysicalParams(**kwargs)


def test_embed_position_examples():
    np.testing.assert_array_equal(embed_position([0, 0], PhysicalParams(radius=5)), [0, 0, 5])
    np.testing.assert_allclose(embed_position([3, 0], PhysicalParams(radius=5)), [3, 0, 4])
    np.testing.assert_allclose(embed_position([3, 0], PhysicalParams(radius=3)), [3, 0, 0])


def test_embed_position_rejects_outside_and_names_radius():
    with pytest.raises(DomainError, match="radius 3"):
        embed_position([3.5, 0], PhysicalParams(radius=3.0))


def test_embed_momentum_examples():
    prm = PhysicalParams(radius=5)
    np.testing.assert_allclose(embed_momentum([0, 0], [1.5, -2], prm), [1.5, -2, 0])
    np.testing.assert_allclose(embed_momentum([3, 0], [0, 2], prm), [0, 2, 0])
    np.testing.assert_allclose(embed_momentum([3, 0], [1, 0], prm), [1, 0, -0.75])
    with pytest.raises(DomainError):
        embed_momentum([5, 0], [1, 0], prm)


@settings(max_examples=200, deadline=None)
@given(
    st.lists(finite, min_size=3, max_size=3),
    st.lists(st.floats(-5, 5), min_size=3, max_size=3),
    st.floats(1.8, 100.0),
)
def test_embeddings_satisfy_phase_point_invariants(x0, p0, r):
    prm = PhysicalParams(radius=r)
    pt = PhasePoint(embed_position(x0, prm), embed_momentum(x0, p0, prm), 3)
    pt.check(prm)


def test_phase_point_constraint_violations():
    prm = PhysicalParams(radius=2.0)
    with pytest.raises(DomainError):
        PhasePoint([0, 2.1], [1, 0], 1).check(prm)
    with pytest.raises(DomainError):
        PhasePoint([0, 2.0], [0, 1], 1).check(prm)
    with pytest.raises(DomainError, match="odd"):
        PhasePoint([0, 0, 2.0], [0, 0, 0], 2)
    with pytest.raises(DomainError):
        ComplexSpherePoint([1, 1j], 1).check(PhysicalParams())


def test_complex_angle_examples():
    prm = PhysicalParams(radius=3.0)
    x = np.array([1.0, 2.0, 2.0])
    assert complex_angle(x, x, prm) == 0
    assert complex_angle(-x, x, prm) == pytest.approx(math.pi, abs=1e-15)
    # a.x / r^2 = cosh(0.2): rotate x towards an imaginary direction
    e1, e2 = np.array([1.0, 0, 0]), np.array([0, 1.0, 0])
    a = 3.0 * (math.cosh(0.2) * e1 + 1j * math.sinh(0.2) * e2)
    th = complex_angle(a, 3.0 * e1, prm)
    assert th.real == pytest.approx(0.0, abs=1e-15)
    assert th.imag == pytest.approx(0.2, rel=1e-14)


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.floats(-3, 3), min_size=2, max_size=2),
    st.lists(st.floats(-3, 3), min_size=2, max_size=2),
    st.lists(st.floats(-3, 3), min_size=2, max_size=2),
    st.floats(4.5, 50.0),
)
def test_complex_angle_solves_cosine_on_principal_branch(x0, p0, x, r):
    prm = PhysicalParams(radius=r)
    a = classical_label_arrays(embed_position(x0, prm), embed_momentum(x0, p0, prm), prm)
    xt = embed_position(x, prm)
    th = complex_angle(a, xt, prm)
    assert -1e-15 <= th.real <= math.pi + 1e-15
    assert abs(np.cos(th) - a @ xt / r**2) <= 1e-12 * max(1.0, abs(a @ xt) / r**2)


def test_complex_angle_batches_over_points():
    prm = PhysicalParams(radius=10.0)
    a = embed_position([0.5, 0.0], prm)
    xs = embed_position(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, -2.0]]), prm)
    batch = complex_angle(a, xs, prm)
    assert batch.shape == (3,)
    for k in range(3):
        assert batch[k] == complex_angle(a, xs[k], prm)


def test_complex_angle_sign_does_not_matter_for_kernel():
    prm = PhysicalParams(radius=4.0)
    a = classical_label_arrays(embed_position([0.2, 0.1, 0], prm), embed_momentum([0.2, 0.1, 0], [0, 0.5, 0.3], prm), prm)
    th = complex_angle(a, embed_position([0.0, 0.4, 0.1], prm), prm)
    assert eval_kernel(3, prm.tau, th) == pytest.approx(eval_kernel(3, prm.tau, -th), rel=1e-13)


def test_complex_angle_is_stable_for_tiny_angles():
    r = 1e4
    prm = PhysicalParams(radius=r)
    a = embed_position([0.0], prm)
    x = embed_position([1e-3], prm)
    # arccos(a.x/r^2) would lose every digit here
    assert complex_angle(a, x, prm).real == pytest.approx(math.asin(1e-7), rel=1e-12)


def test_small_angle_trivial_case():
    res = small_angle_decomposition([0.3, -0.2, 0.1], [0, 0, 0], [0.3, -0.2, 0.1], PhysicalParams(radius=20))
    assert res.theta == 0 and res.defect == 0


def test_small_angle_d1_example():
    res = small_angle_decomposition([0.0], [0.0], [0.5], PhysicalParams(radius=100.0))
    assert abs(res.theta.imag) == 0
    assert res.theta.real == pytest.approx(math.asin(0.005), rel=1e-14)
    assert abs(res.theta_sq - (0.5 / 100) ** 2) < 1e-8


def test_small_angle_defect_scales_like_r_minus_four():
    x0, p0, x = [0.3, -0.2, 0.1], [0.4, 0.6, -0.2], [0.1, 0.2, 0.0]
    rs = np.array([20.0, 40.0, 80.0, 160.0])
    q = [abs(small_angle_decomposition(x0, p0, x, PhysicalParams(radius=r)).defect) for r in rs]
    slope = np.polyfit(np.log(rs), np.log(q), 1)[0]
    assert slope == pytest.approx(-4.0, abs=0.1)
    assert q[0] / q[1] == pytest.approx(16.0, rel=0.05)


def test_small_angle_out_of_regime():
    with pytest.raises(OutOfRegimeError, match="increase r"):
        small_angle_decomposition([0.0], [0.0], [1.9], PhysicalParams(radius=2.0), s=0.5)
    with pytest.raises(DomainError):
        small_angle_decomposition([0.0], [0.0], [0.1], PhysicalParams(radius=2.0), s=4.0)


def test_tangency_check_survives_tiny_momentum():
    prm = PhysicalParams(radius=2.0)
    x0, p0 = [0.0, 1.0, 0.0], [0.0, 1.339124856136968e-206, 0.0]
    PhasePoint(embed_position(x0, prm), embed_momentum(x0, p0, prm), 3).check(prm)
