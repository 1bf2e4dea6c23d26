import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sturm_delay import Constant, ProblemSpec, eval_solution, integrate_segment, solve_w
from sturm_delay.integrator import IntegrationError
from sturm_delay.problem import SegmentId

from conftest import COS, LINEAR_RETARD, ONE, ZERO, free, make


def test_free_segment_value():
    seg = integrate_segment(free(), 1.0, SegmentId.S1, 1.0, -1.0)
    assert seg.nodes[0] == 0.0 and seg.nodes[-1] == 1.0
    assert seg.values[-1] == pytest.approx(math.cos(1) - math.sin(1), abs=1e-11)
    assert seg.values[-1] == pytest.approx(-0.3011687, abs=1e-7)


def test_delay_irrelevant_without_potential():
    spec = make(ZERO, LINEAR_RETARD)
    seg = integrate_segment(spec, 2.0, SegmentId.S1, 1.0, -2.0)
    exact = np.cos(2 * seg.nodes) - np.sin(2 * seg.nodes)
    np.testing.assert_allclose(seg.values, exact, atol=1e-11)


def test_constant_potential_closed_form():
    # y'' + 2y = 0, y(0) = 1, y'(0) = -1
    seg = integrate_segment(make(ONE, ZERO), 1.0, SegmentId.S1, 1.0, -1.0)
    k = math.sqrt(2.0)
    exact = np.cos(k * seg.nodes) - np.sin(k * seg.nodes) / k
    np.testing.assert_allclose(seg.values, exact, atol=1e-11)
    assert seg.values[-1] == pytest.approx(math.cos(k) - math.sin(k) / k, abs=1e-11)


def test_constant_potential_with_retard_against_reference():
    # no closed form; compare default resolution with a 4x finer run
    spec = make(COS, LINEAR_RETARD, 2.0, -0.5)
    fine = spec.with_numerics(steps_per_unit_mu=4 * 256, min_steps_per_segment=1600)
    a, b = solve_w(spec, 7.0), solve_w(fine, 7.0)
    assert abs(a.s3.values[-1] - b.s3.values[-1]) < 1e-9


def test_scaled_free_solution():
    sol = solve_w(free(2.0, 3.0), 1.0)
    assert sol.s3.values[-1] == pytest.approx(-1 / 6, abs=1e-11)


def test_free_endpoint_values():
    sol = solve_w(free(), 1.0)
    assert sol.s3.values[-1] == pytest.approx(-1.0, abs=1e-11)
    assert sol.s3.derivs[-1] == pytest.approx(1.0, abs=1e-11)


def test_identity_transmission_residuals_zero():
    sol = solve_w(make(COS, LINEAR_RETARD), 3.3)
    assert sol.transmission_residuals() == (0.0, 0.0, 0.0, 0.0)


@settings(max_examples=30, deadline=None)
@given(mu=st.floats(0.1, 60), delta=st.floats(0.2, 5), theta=st.floats(-5, -0.2))
def test_transmission_residuals_tiny(mu, delta, theta):
    sol = solve_w(make(COS, LINEAR_RETARD, delta, theta), mu)
    scale = max(1.0, mu)
    assert max(sol.transmission_residuals()) < 1e-12 * scale


def test_eval_solution_endpoints():
    mu = 4.5
    sol = solve_w(make(COS, LINEAR_RETARD, 2.0, 3.0), mu)
    assert eval_solution(sol, 0.0) == (1.0, -mu)
    left, _ = eval_solution(sol, 1.0, "left")
    right, _ = eval_solution(sol, 1.0, "right")
    assert left / right == pytest.approx(2.0, rel=1e-14)
    assert eval_solution(sol, math.pi) == (sol.s3.values[-1], sol.s3.derivs[-1])
    with pytest.raises(ValueError):
        eval_solution(sol, 1.0)
    with pytest.raises(ValueError):
        eval_solution(sol, 3.5)


def test_dense_output_reproduces_nodes():
    sol = solve_w(make(COS, LINEAR_RETARD), 6.0)
    seg = sol.s2
    v, d = seg(seg.nodes[1:-1])
    np.testing.assert_allclose(v, seg.values[1:-1], rtol=0, atol=1e-14)
    np.testing.assert_allclose(d, seg.derivs[1:-1], rtol=0, atol=1e-13)


@settings(max_examples=25, deadline=None)
@given(mu=st.floats(1.0, 50.0), delta=st.sampled_from([1.0, 2.0, -0.5]),
       theta=st.sampled_from([1.0, 3.0, 0.25]))
def test_free_solution_matches_closed_form(mu, delta, theta):
    w = solve_w(free(delta, theta), mu).s3.values[-1]
    exact = math.cos(mu * math.pi) - math.sin(mu * math.pi)
    # the jump factors rescale the error along with the solution
    assert abs(w * delta * theta - exact) <= 1e-9


@pytest.mark.parametrize("q, retard", [(COS, ZERO), (COS, LINEAR_RETARD), (ONE, LINEAR_RETARD)])
def test_fourth_order_convergence(q, retard):
    spec = make(q, retard, 2.0, 3.0)
    w = [solve_w(spec.with_numerics(steps_per_unit_mu=1, min_steps_per_segment=n), 10.0)
         .s3.values[-1] for n in (50, 100, 200)]
    ratio = abs(w[0] - w[2]) / abs(w[1] - w[2])
    assert ratio >= 12


def test_retard_leaving_segment_is_rejected():
    spec = make(ONE, [Constant(0.0), Constant(0.5), Constant(0.0)])
    with pytest.raises(IntegrationError, match="S2"):
        solve_w(spec, 3.0)


def test_overflow_detected():
    spec = make([Constant(-1e300)] * 3, ZERO)
    with pytest.raises(IntegrationError):
        solve_w(spec, 1.0)


def test_bad_mu():
    with pytest.raises(ValueError):
        solve_w(free(), 0.0)
