import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sphcs.errors import DomainError
from sphcs.geometry import ComplexSpherePoint, PhasePoint, PhysicalParams
from sphcs.phase_space import (
    ComplexifierSeriesTruncation,
    bracket_series_oracle,
    classical_label,
    classical_label_arrays,
    invert_label,
)


def random_phase_point(rng, d, params, pscale=1.0):
    r = params.radius
    x = rng.normal(size=d + 1)
    x *= r / np.linalg.norm(x)
    p = rng.normal(size=d + 1) * pscale
    p -= (p @ x) / (r * r) * x
    return PhasePoint(x, p, d)


def test_zero_momentum_gives_real_label():
    prm = PhysicalParams(radius=2.0)
    pt = PhasePoint([0.0, 2.0], [0.0, 0.0], 1)
    np.testing.assert_array_equal(classical_label(pt, prm).a, [0, 2])


def test_unit_example_and_inverse():
    prm = PhysicalParams()
    a = classical_label(PhasePoint([1.0, 0.0], [0.0, 1.0], 1), prm)
    np.testing.assert_allclose(a.a, [math.cosh(1), 1j * math.sinh(1)], rtol=1e-15)
    back = invert_label(ComplexSpherePoint([math.cosh(1), 1j * math.sinh(1)], 1), prm)
    np.testing.assert_allclose(back.x, [1, 0], atol=1e-15)
    np.testing.assert_allclose(back.p, [0, 1], atol=1e-15)


def test_constraint_holds_on_many_points():
    rng = np.random.default_rng(7)
    for d in (1, 3, 5):
        for _ in range(334):
            prm = PhysicalParams(rng.uniform(0.2, 3), rng.uniform(0.2, 3), rng.uniform(0.2, 3), rng.uniform(0.5, 20))
            # |p| up to about 2 m omega r keeps cosh^2 - sinh^2 well conditioned
            pt = random_phase_point(rng, d, prm, pscale=rng.uniform(0.0, 1.0) * prm.m_omega * prm.radius)
            classical_label(pt, prm).check(prm)


def test_small_momentum_branch_is_continuous():
    prm = PhysicalParams(radius=1.0)
    x = np.array([1.0, 0.0])
    for eps in (1e-3, 1e-5, 1e-9, 0.0):
        a = classical_label_arrays(x, np.array([0.0, eps]), prm)
        assert a[1].imag == pytest.approx(math.sinh(eps) if eps else 0.0, rel=1e-14, abs=1e-300)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([1, 3, 5]), st.one_of(st.just(0.0), st.floats(1e-6, 4.0)))
def test_round_trip(seed, d, pscale):
    rng = np.random.default_rng(seed)
    prm = PhysicalParams(1.0, 1.3, 0.8, 3.0)
    pt = random_phase_point(rng, d, prm, pscale)
    back = invert_label(classical_label(pt, prm), prm)
    scale = prm.radius + np.linalg.norm(pt.p)
    np.testing.assert_allclose(back.x, pt.x, atol=1e-10 * scale)
    np.testing.assert_allclose(back.p, pt.p, atol=1e-10 * scale)


def test_invert_rejects_label_off_the_complex_sphere():
    with pytest.raises(DomainError):
        invert_label(ComplexSpherePoint([0.5, 0.0], 1), PhysicalParams())


def test_invert_at_large_momentum():
    prm = PhysicalParams(radius=0.5)
    pt = PhasePoint([0.5, 0.0], [0.0, 8.0], 1)
    back = invert_label(classical_label(pt, prm), prm)
    np.testing.assert_allclose(back.p, pt.p, rtol=1e-10, atol=1e-12)


def test_injective_on_samples():
    rng = np.random.default_rng(3)
    prm = PhysicalParams(radius=2.0)
    for _ in range(200):
        p1 = random_phase_point(rng, 3, prm)
        p2 = random_phase_point(rng, 3, prm)
        sep_in = np.linalg.norm(np.concatenate([p1.x - p2.x, p1.p - p2.p]))
        sep_out = np.linalg.norm(classical_label(p1, prm).a - classical_label(p2, prm).a)
        assert sep_out >= 0.05 * sep_in


def test_truncation_validation():
    with pytest.raises(DomainError):
        ComplexifierSeriesTruncation(order=5)
    with pytest.raises(DomainError):
        ComplexifierSeriesTruncation(order=-1)
    with pytest.raises(DomainError):
        ComplexifierSeriesTruncation(fd_step=1e-2)


def test_oracle_low_orders():
    prm = PhysicalParams(1.0, 1.2, 0.9, 2.0)
    rng = np.random.default_rng(11)
    pt = random_phase_point(rng, 3, prm, 0.5)
    np.testing.assert_array_equal(bracket_series_oracle(pt, prm, ComplexifierSeriesTruncation(0)), pt.x)
    first = bracket_series_oracle(pt, prm, ComplexifierSeriesTruncation(1)) - pt.x
    np.testing.assert_allclose(first, 1j * pt.p / prm.m_omega, rtol=1e-7, atol=1e-9)


@pytest.mark.parametrize("pmag", [0.2, 0.5, 1.0])
def test_oracle_order_three_matches_cubic_taylor(pmag):
    prm = PhysicalParams(radius=1.0)
    pt = PhasePoint([0.6, 0.0, 0.8, 0.0], [0.0, pmag, 0.0, 0.0], 3)
    eta = pt.angular_momentum / (prm.m_omega * prm.radius**2)
    cubic = (1 + eta**2 / 2) * pt.x + 1j * (1 + eta**2 / 6) * pt.p / prm.m_omega
    got = bracket_series_oracle(pt, prm, ComplexifierSeriesTruncation(3, 1e-4))
    assert np.linalg.norm(got - cubic) / np.linalg.norm(cubic) <= 1e-4
    exact = classical_label(pt, prm).a
    # the gap to the closed form is the quartic Taylor remainder
    assert np.linalg.norm(got - exact) <= 0.1 * eta**4 * np.linalg.norm(pt.x)
