"""Independent reconstruction of ``w`` by Picard iteration.

Each segment solution satisfies a Volterra equation of the second kind

    w(x) = A cos mu(x-a) + (B/mu) sin mu(x-a)
           - (1/mu) int_a^x q(t) sin mu(x-t) w(t - retard(t)) dt

with ``(A, B)`` the value and slope handed over at the left end ``a``.  The
iteration starts from the trigonometric part, integrates with cumulative
Simpson on a uniform grid and reads retarded values by linear interpolation of
the current iterate.  The grid is the one the RK4 integrator uses, so the two
solutions can be compared node by node.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_simpson

from .integrator import solve_w
from .problem import ProblemSpec, SegmentId


class NonContractionError(ValueError):
    """mu is below the contraction threshold 2 * int |q| on the segment."""


class PicardBudgetError(RuntimeError):
    def __init__(self, msg, result):
        super().__init__(msg)
        self.result = result


@dataclass(frozen=True, eq=False)
class PicardResult:
    segment: SegmentId
    grid: np.ndarray
    values: np.ndarray
    derivs: np.ndarray
    iterations: int
    final_delta: float
    trace: tuple[float, ...] = field(default=())
    contractive: bool = True


def picard_segment(spec: ProblemSpec, mu: float, seg: SegmentId, y0: float, dy0: float,
                   force: bool = False, q_abs: float | None = None,
                   raise_on_budget: bool = True) -> PicardResult:
    """Picard iterates for one segment with left-end data ``(y0, dy0)``."""
    seg = SegmentId(seg)
    if q_abs is None:
        q_abs = spec.q_abs_integrals()[seg]
    contractive = mu >= 2.0 * q_abs
    if not contractive and not force:
        raise NonContractionError(
            f"mu={mu:g} is below the contraction threshold 2*int|q| = {2 * q_abs:.6g} "
            f"on {seg.name}; pass force=True to iterate anyway"
        )
    a, b = spec.bounds(seg)
    num = spec.numerics
    n = num.steps(mu, b - a)
    x = a + (b - a) / n * np.arange(n + 1)
    x[-1] = b
    qv = spec.q.on_segment(seg, x)
    z = np.clip(x - spec.retard.on_segment(seg, x), a, b)

    ph = mu * (x - a)
    c, s = np.cos(ph), np.sin(ph)
    base = y0 * c + dy0 / mu * s
    dbase = -mu * y0 * s + dy0 * c
    w = base
    trace = []
    it = 0
    change = np.inf
    while it < num.picard_max_iter:
        it += 1
        g = qv * np.interp(z, x, w)
        ic = cumulative_simpson(g * c, x=x, initial=0.0)
        is_ = cumulative_simpson(g * s, x=x, initial=0.0)
        # sin mu(x-t) = sin mu(x-a) cos mu(t-a) - cos mu(x-a) sin mu(t-a)
        new = base - (s * ic - c * is_) / mu
        change = float(np.max(np.abs(new - w)))
        trace.append(change)
        w = new
        if change <= num.picard_tol:
            break
    g = qv * np.interp(z, x, w)
    ic = cumulative_simpson(g * c, x=x, initial=0.0)
    is_ = cumulative_simpson(g * s, x=x, initial=0.0)
    dw = dbase - (c * ic + s * is_)
    result = PicardResult(seg, x, w, dw, it, change, tuple(trace), contractive)
    if change > num.picard_tol and raise_on_budget:
        raise PicardBudgetError(
            f"Picard iteration on {seg.name} stopped after {it} iterations "
            f"with sup change {change:.3g} > {num.picard_tol:g}", result)
    return result


def picard_solution(spec: ProblemSpec, mu: float, force: bool = False,
                    raise_on_budget: bool = True) -> tuple[PicardResult, PicardResult, PicardResult]:
    """All three segments, chained through the transmission data."""
    qa = spec.q_abs_integrals()
    r1 = picard_segment(spec, mu, SegmentId.S1, 1.0, -mu, force, qa[0], raise_on_budget)
    r2 = picard_segment(spec, mu, SegmentId.S2, r1.values[-1] / spec.delta,
                        r1.derivs[-1] / spec.delta, force, qa[1], raise_on_budget)
    r3 = picard_segment(spec, mu, SegmentId.S3, r2.values[-1] / spec.theta,
                        r2.derivs[-1] / spec.theta, force, qa[2], raise_on_budget)
    return r1, r2, r3


@dataclass(frozen=True, eq=False)
class CrossValidation:
    mu: float
    discrepancy: float
    per_segment: tuple[float, float, float]
    picard: tuple[PicardResult, PicardResult, PicardResult]
    forced: bool

    def __float__(self):
        return self.discrepancy


def cross_validate_report(spec: ProblemSpec, mu: float, force: bool = False) -> CrossValidation:
    picard = picard_solution(spec, mu, force)
    sol = solve_w(spec, mu)
    per = tuple(float(np.max(np.abs(p.values - s.values)))
                for p, s in zip(picard, sol.segments))
    return CrossValidation(float(mu), max(per), per, picard,
                           forced=not all(p.contractive for p in picard))


def cross_validate(spec: ProblemSpec, mu: float, force: bool = False) -> float:
    """Sup-norm gap between the Picard and RK4 solutions over all segments."""
    return cross_validate_report(spec, mu, force).discrepancy
