import math

import numpy as np
import pytest

from sturm_delay import characteristic_H, bound_audit
from sturm_delay.characteristic import H_norm, leading_defect

from conftest import COS, LINEAR_RETARD, ONE, ZERO, free, make


@pytest.mark.parametrize("mu, expected", [(0.5, -0.75), (1.0, 0.0), (2.0, 2.0)])
def test_free_values(mu, expected):
    # w = cos mu x - sin mu x, so H = -mu^2 (sin + cos)(mu pi) + mu^2 (cos - sin)(mu pi)
    cv = characteristic_H(free(), mu)
    assert cv.H == pytest.approx(expected, abs=1e-10)


def test_normalisation_switch():
    cv = characteristic_H(free(), 2.0)
    assert cv.H_norm == pytest.approx(cv.H / 4)
    cv = characteristic_H(free(), 0.5)
    assert cv.H_norm == cv.H


def test_free_normalised_closed_form():
    for mu in np.linspace(1.0, 50.0, 37):
        c, s = math.cos(mu * math.pi), math.sin(mu * math.pi)
        exact = c - s - (s + c) / mu
        assert abs(H_norm(free(), mu) - exact) <= 1e-9


def test_roots_do_not_depend_on_jump_factors():
    base = make(COS, LINEAR_RETARD)
    scaled = make(COS, LINEAR_RETARD, 2.0, -0.5)
    for mu in np.linspace(1.1, 9.7, 12):
        assert H_norm(scaled, mu) * 2.0 * -0.5 == pytest.approx(H_norm(base, mu), rel=1e-12,
                                                                abs=1e-14)


@pytest.mark.parametrize("q, retard", [(ZERO, ZERO), (COS, ZERO), (COS, LINEAR_RETARD)])
def test_leading_defect_stays_bounded(q, retard):
    spec = make(q, retard, 2.0, 3.0)
    lo = max(abs(leading_defect(spec, mu)) for mu in np.linspace(10, 50, 41))
    hi = max(abs(leading_defect(spec, mu)) for mu in np.linspace(10, 100, 91))
    assert hi <= 1.25 * lo + 1e-9


def test_free_leading_defect_closed_form():
    # mu H_norm = mu (cos - sin) - (sin + cos) and sqrt(2) sin(mu pi - pi/4) = sin - cos
    for mu in (10.3, 27.9, 55.5):
        d = leading_defect(free(), mu)
        assert d == pytest.approx(-(math.sin(mu * math.pi) + math.cos(mu * math.pi)), abs=1e-7)


def test_audit_free_problem():
    rep = bound_audit(free(), 3.0)
    assert rep.passed
    assert rep.rows[0].sampled_max == pytest.approx(math.sqrt(2), abs=1e-6)
    assert all(r.applicable for r in rep.rows)


def test_audit_constant_potential():
    rep = bound_audit(make(ONE, ZERO, 2.0, 3.0), 2.0 * math.pi + 0.5)
    assert rep.passed
    assert rep.rows[2].bound == pytest.approx(4 * math.sqrt(2))
    assert rep.rows[4].bound == pytest.approx(32 * math.sqrt(2) / 6)


def test_audit_not_applicable_below_threshold():
    rep = bound_audit(make(ONE, ZERO), 0.1)
    assert {r.status for r in rep.rows} == {"N/A"}
    assert rep.passed
