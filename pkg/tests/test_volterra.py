import math

import numpy as np
import pytest

from sturm_delay import cross_validate, picard_segment, solve_w
from sturm_delay.problem import SegmentId
from sturm_delay.volterra import (NonContractionError, PicardBudgetError,
                                  cross_validate_report, picard_solution)

from conftest import COS, LINEAR_RETARD, ONE, ZERO, free, make


def test_free_problem_needs_one_iteration():
    r = picard_segment(free(), 5.0, SegmentId.S1, 1.0, -5.0)
    assert r.iterations == 1
    assert r.final_delta == 0.0
    exact = np.cos(5 * r.grid) - np.sin(5 * r.grid)
    np.testing.assert_allclose(r.values, exact, atol=1e-14)
    np.testing.assert_allclose(r.derivs, -5 * np.sin(5 * r.grid) - 5 * np.cos(5 * r.grid),
                               atol=1e-12)


def test_grid_matches_integrator_nodes():
    spec = make(COS, LINEAR_RETARD, 2.0, 3.0)
    sol = solve_w(spec, 8.0)
    for p, s in zip(picard_solution(spec, 8.0), sol.segments):
        np.testing.assert_array_equal(p.grid, s.nodes)


def test_constant_potential_against_closed_form():
    mu = 4.0
    r = picard_segment(make(ONE, ZERO), mu, SegmentId.S1, 1.0, -mu)
    k = math.sqrt(mu * mu + 1)
    exact = np.cos(k * r.grid) - mu / k * np.sin(k * r.grid)
    assert np.max(np.abs(r.values - exact)) < 1e-6


def test_constant_potential_against_fine_rk4():
    mu = 4.0
    spec = make(ONE, ZERO)
    fine = spec.with_numerics(steps_per_unit_mu=4 * 256, min_steps_per_segment=1600)
    w_ref = solve_w(fine, mu).s1.values[-1]
    r = picard_segment(spec, mu, SegmentId.S1, 1.0, -mu)
    assert abs(r.values[-1] - w_ref) < 1e-6


def test_below_threshold_refused():
    with pytest.raises(NonContractionError):
        picard_segment(make(ONE, ZERO), 0.1, SegmentId.S1, 1.0, -0.1)
    with pytest.raises(NonContractionError):
        cross_validate(make(ONE, ZERO), 0.1)


def test_forced_run_flags_advisory():
    rep = cross_validate_report(make(ONE, ZERO), 1.5, force=True)
    assert rep.forced
    assert not rep.picard[0].contractive


@pytest.mark.parametrize("q, retard", [(ONE, ZERO), (COS, LINEAR_RETARD), (ONE, LINEAR_RETARD)])
def test_iterates_contract_at_predicted_rate(q, retard):
    spec = make(q, retard)
    mu = 6.0
    qa = spec.q_abs_integrals()
    for seg in SegmentId:
        r = picard_segment(spec, mu, seg, 1.0, -mu)
        tr = [t for t in r.trace if t > 1e-13]
        ratios = [b / a for a, b in zip(tr, tr[1:])]
        assert ratios
        assert max(ratios) <= qa[seg] / mu * (1 + 1e-6) + 1e-12


def test_budget_exhaustion_reports_partial_result():
    spec = make(ONE, ZERO).with_numerics(picard_max_iter=2)
    with pytest.raises(PicardBudgetError) as exc:
        picard_segment(spec, 3.0, SegmentId.S1, 1.0, -3.0)
    assert exc.value.result.iterations == 2


@pytest.mark.parametrize("q, retard", [(COS, ZERO), (COS, LINEAR_RETARD), (ONE, LINEAR_RETARD)])
def test_discrepancy_shrinks_with_resolution(q, retard):
    spec = make(q, retard, 2.0, -0.5)
    coarse = cross_validate(spec, 10.0)
    fine = cross_validate(spec.with_numerics(steps_per_unit_mu=4 * 256,
                                             min_steps_per_segment=1600), 10.0)
    assert coarse <= 1e-5
    assert fine <= 1e-7
    assert fine <= coarse


def test_free_discrepancy_tiny():
    assert cross_validate(free(2.0, 3.0), 5.0) < 1e-9
