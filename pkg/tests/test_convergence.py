import math

import numpy as np
import pytest

from pointint.convergence import (
    DEFAULT_A_SEQ,
    ConvergenceRow,
    eigenvalue_drift,
    element_slopes,
    expansion_check,
    expansion_residual,
    fit_loglog_slope,
    monotone_tail,
    u_limit_table,
)
from pointint.transfer import PointParams

from conftest import BOX, MIXED, MIXED_APPROX, MIXED_EXACT, FLAT, FLAT_APPROX, FLAT_EXACT


@pytest.mark.parametrize("p", [MIXED, FLAT], ids=["gamma", "no_gamma"])
def test_limit_table(p):
    rows = u_limit_table(p, 1.0)
    assert [r.a for r in rows] == list(DEFAULT_A_SEQ)
    assert all(r.det_error < 1e-8 for r in rows)
    assert max(rows[-1].element_errors) < 1e-4
    assert monotone_tail(rows)


def test_single_delta_rows_are_tiny():
    v, k = 2.5, 1.0
    for r in u_limit_table(PointParams.delta_potential(v), k):
        assert max(r.element_errors) <= abs(v) * (k * r.a) ** 2 + 4 * r.a


def test_gamma_zero_lower_left():
    row = u_limit_table(FLAT, 1.0, (1e-5,))[0]
    assert row.element_errors[2] < 3e-5


def test_lower_left_error_is_twice_a():
    for k in (0.3, 1.0):
        row = u_limit_table(MIXED, k, (1e-4,))[0]
        assert 1.8 <= row.element_errors[2] / row.a <= 2.2


def test_element_slopes_are_first_order():
    rows = [r for r in u_limit_table(MIXED, 1.0) if r.a <= 1e-2]
    assert all(abs(s - 1) < 0.1 for s in element_slopes(rows))


def test_expansion_slope():
    assert expansion_check(MIXED, 1.0) == pytest.approx(3.0, abs=0.3)


def test_expansion_residual_small():
    assert abs(expansion_residual(PointParams.epsilon_potential(1.0), 2.0, 1e-3)) < 1e-7
    # at k = 0 the remainder vanishes up to rounding of gamma/a^2 terms
    assert abs(expansion_residual(MIXED, 0.0, 1e-3)) < 1e-12


def test_expansion_needs_gamma():
    with pytest.raises(ValueError):
        expansion_residual(FLAT, 1.0, 1e-3)


def test_fit_slope():
    xs = np.array([1e-3, 1e-2, 1e-1])
    assert fit_loglog_slope(xs, 5 * xs**2) == pytest.approx(2.0)
    # points under the noise floor are dropped
    assert math.isnan(fit_loglog_slope(xs, [1e-14, 1e-13, 1.0]))


@pytest.mark.parametrize("bad", [(), (0.1, 0.2), (0.1, -0.1)])
def test_bad_a_seq(bad):
    with pytest.raises(ValueError):
        u_limit_table(MIXED, 1.0, bad)


def test_row_defaults():
    assert ConvergenceRow(0.1, (0, 0, 0, 0), 0).k_n_error is None


def test_drift_reproduces_reference_rows():
    (a, k, err), = eigenvalue_drift(MIXED, BOX, 10, (0.2,))
    assert abs(k - MIXED_APPROX[10]) < 1e-6
    assert abs((k - err) - MIXED_EXACT[10]) < 1e-6
    (a, k, err), = eigenvalue_drift(FLAT, BOX, 7, (0.2,))
    assert abs(k - FLAT_APPROX[7]) < 1e-6
    assert abs((k - err) - FLAT_EXACT[7]) < 1e-6


def test_drift_shrinks():
    seq = (1e-2, 3e-3, 1e-3, 1e-4)
    errs = [abs(e) for _, _, e in eigenvalue_drift(MIXED, BOX, 10, seq)]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert errs[2] < 1e-3


def test_free_drift_is_zero():
    for _, _, err in eigenvalue_drift(PointParams.free(), BOX, 3, (0.2, 1e-3)):
        assert abs(err) < 1e-12


def test_drift_rejects_negative_state():
    with pytest.raises(ValueError):
        eigenvalue_drift(MIXED, BOX, 2, (0.1,))
