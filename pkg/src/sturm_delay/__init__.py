"""Retarded Sturm-Liouville problem with transmission conditions: spectrum and asymptotics."""

from .asymptotics import (
    check_oscillatory_decay,
    eigenfunction_first_order,
    eigenfunction_refined,
    mu_leading,
    mu_refined,
    q_delay_integral,
)
from .characteristic import bound_audit, characteristic_H
from .integrator import eval_solution, integrate_segment, solve_w
from .problem import (
    Constant,
    NumericsConfig,
    PiecewiseFunction,
    Poly,
    ProblemError,
    ProblemSpec,
    SegmentId,
    Sinusoid,
    Table,
    eval_piecewise,
    load_spec,
    spec_from_dict,
    validate_problem,
)
from .spectrum import find_eigen_near, scan_spectrum, simplicity_check
from .volterra import cross_validate, picard_segment

__all__ = [
    "Constant", "NumericsConfig", "PiecewiseFunction", "Poly", "ProblemError",
    "ProblemSpec", "SegmentId", "Sinusoid", "Table", "bound_audit", "characteristic_H",
    "check_oscillatory_decay", "cross_validate", "eigenfunction_first_order",
    "eigenfunction_refined", "eval_piecewise", "eval_solution", "find_eigen_near",
    "integrate_segment", "load_spec", "mu_leading", "mu_refined", "picard_segment",
    "q_delay_integral", "scan_spectrum", "simplicity_check", "solve_w", "spec_from_dict",
    "validate_problem",
]
