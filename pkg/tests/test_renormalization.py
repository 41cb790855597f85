import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from pointint.renormalization import (
    BranchTag,
    DegenerateSchedule,
    ThreeDeltaRealization,
    classify_branch,
    is_ill_conditioned,
    realize,
    three_delta_matrix,
    u_elements_closed_form,
)
from pointint.transfer import PointParams, mat_det, propagator

from conftest import MIXED, FLAT


@st.composite
def sl2_params(draw, gamma_zero=None):
    theta = draw(st.floats(-math.pi, math.pi))
    if gamma_zero is None:
        gamma_zero = draw(st.booleans())
    if gamma_zero:
        alpha = draw(st.sampled_from([-1, 1])) * math.exp(draw(st.floats(-1.5, 1.5)))
        return PointParams(theta, alpha, draw(st.floats(-5, 5)), 0.0, 1 / alpha)
    alpha, delta = draw(st.floats(-5, 5)), draw(st.floats(-5, 5))
    gamma = draw(st.sampled_from([-1, 1])) * draw(st.floats(0.1, 10))
    return PointParams(theta, alpha, (alpha * delta - 1) / gamma, gamma, delta)


spacing = st.floats(1e-4, 1.0)
wave = st.floats(0, 5)


def test_branch_examples():
    assert classify_branch(MIXED) is BranchTag.GammaNonZero
    assert classify_branch(FLAT) is BranchTag.GammaZero
    assert classify_branch(PointParams(0, -1, 2.5, 0, -1)) is BranchTag.GammaZeroNegativeIdentity
    # just above the branch threshold
    assert classify_branch(PointParams(0, 1, 0, 2e-12, 1)) is BranchTag.GammaNonZero


def test_ill_conditioned_window():
    assert is_ill_conditioned(PointParams(0, 1, 0, 1e-8, 1))
    assert not is_ill_conditioned(MIXED)
    assert not is_ill_conditioned(FLAT)


def test_mixed_strengths():
    r = realize(MIXED, 0.2)
    assert r.v_0 == pytest.approx(-175.0, rel=1e-15)
    assert r.v_plus == pytest.approx(-5 + 4 / -7, rel=1e-15)
    assert r.v_minus == pytest.approx(-5 + 6 / -7, rel=1e-15)
    assert r.A == 0.0 and not r.extra_phase_pi


@pytest.mark.parametrize("a", [1.0, 0.2, 1e-3, 1e-6])
def test_single_delta_is_a_independent(a):
    r = realize(PointParams.delta_potential(2.5), a)
    assert r.strengths == (0.0, 2.5, 0.0)


@pytest.mark.parametrize("a", [0.3, 1e-2, 1e-5])
def test_epsilon_schedule(a):
    u = 0.7
    r = realize(PointParams.epsilon_potential(u), a)
    assert r.v_0 == u / a**2
    assert r.v_plus == r.v_minus == -1 / a + 2 / u


def test_escape_case_flags_phase():
    r = realize(PointParams(0.4, -1, 1.5, 0, -1), 0.1)
    assert r.extra_phase_pi
    assert r.strengths == (0.0, -1.5, 0.0)
    assert r.A == pytest.approx(2.0)
    direct = np.exp(-2j * r.A * r.a) * three_delta_matrix(r, 0.8)
    assert np.allclose(u_elements_closed_form(r, 0.8), direct, atol=1e-14)
    # the limit is -V_delta(-beta) = [[-1, beta], [0, -1]]
    tiny = realize(PointParams(0.4, -1, 1.5, 0, -1), 1e-9)
    assert np.allclose(u_elements_closed_form(tiny, 0.8), [[-1, 1.5], [0, -1]], atol=1e-8)


def test_realize_guards():
    with pytest.raises(ValueError):
        realize(MIXED, 0.0)
    with pytest.raises(ValueError):
        ThreeDeltaRealization(0.1, math.nan, 0, 0)
    # alpha + delta + 2 = (alpha + 1)^2 / alpha when alpha * delta = 1, so it
    # underflows the tolerance well before alpha reaches -1 itself
    alpha = -1 - 1e-7
    near = PointParams(0, alpha, 0.3, 0, 1 / alpha)
    assert classify_branch(near) is BranchTag.GammaZero
    with pytest.raises(DegenerateSchedule):
        realize(near, 0.1)


def test_zero_strengths_give_free_propagation():
    r = ThreeDeltaRealization(0.3, 0.0, 0.0, 0.0)
    k = 1.3
    assert np.allclose(three_delta_matrix(r, k), propagator(0, k, 0.6), atol=1e-15)
    assert np.allclose(u_elements_closed_form(r, k), propagator(0, k, 0.6).real, atol=1e-15)


def test_mixed_direct_product_matches_closed_form():
    r = realize(MIXED.with_theta(0.9), 0.2)
    direct = three_delta_matrix(r, 1.0)
    closed = u_elements_closed_form(r, 1.0)
    assert np.allclose(np.exp(-2j * r.A * r.a) * direct, closed, atol=1e-12, rtol=0)
    assert mat_det(direct) == pytest.approx(np.exp(4j * r.A * r.a), abs=1e-12)


def test_vectorized_matches_scalar():
    r = realize(MIXED, 1e-5)
    ks = np.array([0.0, 0.3, 1.0, 2.5])
    batch = u_elements_closed_form(r, ks)
    assert batch.shape == (4, 2, 2)
    for k, m in zip(ks, batch):
        assert np.array_equal(m, u_elements_closed_form(r, k))


def test_small_spacing_keeps_determinant():
    # As written, [U]_12 cancels O(1/a^2) terms down to O(1).
    for a in (1e-4, 1e-5, 1e-6):
        for p in (MIXED, FLAT):
            assert abs(mat_det(u_elements_closed_form(realize(p, a), 1.0)) - 1) < 1e-12


@settings(max_examples=200, deadline=None)
@given(sl2_params(), spacing, wave)
def test_u_is_real_sl2(p, a, k):
    try:
        r = realize(p, a)
    except DegenerateSchedule:
        assert abs(p.alpha + p.delta + 2) <= 1e-12
        return
    u = u_elements_closed_form(r, k)
    assert u.dtype == float
    assert abs(mat_det(u) - 1) <= 1e-10


@settings(max_examples=200, deadline=None)
@given(sl2_params(gamma_zero=False), st.floats(0.01, 1.0), st.floats(0, 3))
def test_gauge_factorization(p, a, k):
    r = realize(p, a)
    direct = three_delta_matrix(r, k)
    closed = np.exp(2j * r.A * r.a) * u_elements_closed_form(r, k)
    scale = max(1.0, np.max(np.abs(closed)))
    assert np.max(np.abs(direct - closed)) <= 1e-10 * scale


@settings(max_examples=100, deadline=None)
@given(sl2_params(), spacing, wave, st.floats(-3, 3))
def test_closed_form_ignores_theta(p, a, k, theta):
    u0 = u_elements_closed_form(realize(p, a), k)
    u1 = u_elements_closed_form(realize(p.with_theta(theta), a), k)
    assert np.array_equal(u0, u1)


@settings(max_examples=200, deadline=None)
@given(sl2_params(gamma_zero=True), spacing)
def test_gamma_zero_side_strength_identity(p, a):
    assume(classify_branch(p) is BranchTag.GammaZero)
    assume(abs(p.alpha + p.delta + 2) > 1e-12)
    r = realize(p, a)
    lhs = r.v_plus + r.v_minus + 2 * r.v_plus * r.v_minus * a
    scale = abs(r.v_plus) + abs(r.v_minus) + abs(2 * r.v_plus * r.v_minus * a)
    assert abs(lhs) <= 1e-9 * max(scale, 1.0)
