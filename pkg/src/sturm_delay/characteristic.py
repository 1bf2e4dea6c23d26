"""Characteristic function and the a-priori bounds on the shooting solution."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .integrator import PiecewiseSolution, solve_w
from .problem import ProblemSpec

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class CharValue:
    mu: float
    H: float
    H_norm: float
    w_pi: float
    dw_pi: float


def characteristic_H(spec: ProblemSpec, mu: float) -> CharValue:
    """``H = w'(pi) + mu^2 w(pi)``; ``H_norm = H / mu^2`` once ``mu >= 1``."""
    sol = solve_w(spec, mu)
    w_pi = float(sol.s3.values[-1])
    dw_pi = float(sol.s3.derivs[-1])
    H = dw_pi + mu * mu * w_pi
    return CharValue(float(mu), H, H / (mu * mu) if mu >= 1.0 else H, w_pi, dw_pi)


def H_norm(spec: ProblemSpec, mu: float) -> float:
    return characteristic_H(spec, mu).H_norm


def leading_defect(spec: ProblemSpec, mu: float) -> float:
    """``delta*theta*mu*H_norm + sqrt(2)*mu*sin(mu*pi - pi/4)``.

    For large ``mu`` the normalised characteristic function behaves like
    ``-sqrt(2) sin(mu pi - pi/4) / (delta theta)``, so this remainder stays
    bounded.
    """
    hn = H_norm(spec, mu)
    return spec.delta * spec.theta * mu * hn + SQRT2 * mu * math.sin(mu * math.pi - math.pi / 4)


@dataclass(frozen=True)
class BoundRow:
    quantity: str
    sampled_max: float
    bound: float
    threshold: float
    applicable: bool

    @property
    def status(self) -> str:
        if not self.applicable:
            return "N/A"
        return "PASS" if self.sampled_max <= self.bound else "FAIL"


@dataclass(frozen=True)
class BoundReport:
    mu: float
    q_abs: tuple[float, float, float]
    rows: tuple[BoundRow, ...]

    @property
    def violations(self) -> int:
        return sum(r.status == "FAIL" for r in self.rows)

    @property
    def passed(self) -> bool:
        return self.violations == 0


def _sampled_abs_max(seg, scale=1.0) -> tuple[float, float]:
    mids = 0.5 * (seg.nodes[1:] + seg.nodes[:-1])
    v, d = seg(mids)
    vmax = max(np.max(np.abs(seg.values)), np.max(np.abs(v)))
    dmax = max(np.max(np.abs(seg.derivs)), np.max(np.abs(d)))
    return float(vmax), float(dmax / scale)


def bound_audit(spec: ProblemSpec, mu: float, sol: PiecewiseSolution | None = None,
                 q_abs: tuple[float, float, float] | None = None) -> BoundReport:
    """Compare sampled ``|w_i|`` and ``|w_i'|/mu`` against their a-priori bounds.

    A bound is only enforced once ``mu`` clears its threshold
    (``2 q1``, ``max(2 q1, 2 q2)``, ``max(2 q1, 2 q2, 2 q3)``).
    """
    sol = sol or solve_w(spec, mu)
    q1, q2, q3 = q_abs or spec.q_abs_integrals()
    t1 = 2 * q1
    t2 = max(t1, 2 * q2)
    t3 = max(t2, 2 * q3)
    ad = abs(spec.delta)
    adt = abs(spec.delta * spec.theta)
    v1, d1 = _sampled_abs_max(sol.s1, mu)
    v2, d2 = _sampled_abs_max(sol.s2, mu)
    v3, _ = _sampled_abs_max(sol.s3, mu)
    rows = (
        BoundRow("|w1|", v1, 2 * SQRT2, t1, mu >= t1),
        BoundRow("|w1'|/mu", d1, 2 * SQRT2, t1, mu >= t1),
        BoundRow("|w2|", v2, 8 * SQRT2 / ad, t2, mu >= t2),
        BoundRow("|w2'|/mu", d2, 8 * SQRT2 / ad, t2, mu >= t2),
        BoundRow("|w3|", v3, 32 * SQRT2 / adt, t3, mu >= t3),
    )
    return BoundReport(float(mu), (q1, q2, q3), rows)
