"""Shooting solution of the retarded equation, segment by segment.

On each segment ``y'' + q(x) y(x - retard(x)) + mu^2 y = 0`` is advanced with
classical fixed-step RK4.  The retarded value at a stage abscissa is read from
the cubic Hermite interpolant of the nodes already computed; when it falls
inside the step being taken it is extrapolated from the last completed step.
Because ``x - retard(x)`` never leaves the current segment, each segment only
needs its own history.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numba
import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .problem import PI, ProblemSpec, SegmentId, Side, segment_ids, segment_of


class IntegrationError(RuntimeError):
    """Non-finite state or a retarded argument leaving the segment."""


@numba.njit(cache=True, nogil=True)
def _hermite(t, h, y0, m0, y1, m1):
    t2 = t * t
    t3 = t2 * t
    return ((2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * h * m0
            + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * h * m1)


@numba.njit(cache=True, nogil=True)
def _lagged(z, i, a, h, ys, ps, ypp0):
    # value of the solution at z, with nodes 0..i completed
    xi = a + i * h
    if z <= xi:
        j = int((z - a) / h)
        if j >= i:
            j = i - 1
        if j < 0:
            return ys[0]
        return _hermite((z - (a + j * h)) / h, h, ys[j], ps[j], ys[j + 1], ps[j + 1])
    if i == 0:
        s = z - a
        return ys[0] + ps[0] * s + 0.5 * ypp0 * s * s
    return _hermite((z - (xi - h)) / h, h, ys[i - 1], ps[i - 1], ys[i], ps[i])


@numba.njit(cache=True, nogil=True)
def _rk4_delay(a, h, n, mu2, qv, lag, y0, p0, ys, ps):
    """Fill ``ys``/``ps`` (length n+1).  ``qv``/``lag`` hold q and the retard at
    the half-step abscissae ``a + k h / 2`` for k = 0..2n."""
    ys[0] = y0
    ps[0] = p0
    ypp0 = -(mu2 + qv[0]) * y0
    half = 0.5 * h
    for i in range(n):
        y = ys[i]
        p = ps[i]
        x = a + i * h
        k0 = 2 * i
        # stage 1
        d = lag[k0]
        yd = y if d == 0.0 else _lagged(x - d, i, a, h, ys, ps, ypp0)
        ky1 = p
        kp1 = -mu2 * y - qv[k0] * yd
        # stage 2
        ys2 = y + half * ky1
        ps2 = p + half * kp1
        d = lag[k0 + 1]
        yd = ys2 if d == 0.0 else _lagged(x + half - d, i, a, h, ys, ps, ypp0)
        ky2 = ps2
        kp2 = -mu2 * ys2 - qv[k0 + 1] * yd
        # stage 3
        ys3 = y + half * ky2
        ps3 = p + half * kp2
        yd = ys3 if d == 0.0 else _lagged(x + half - d, i, a, h, ys, ps, ypp0)
        ky3 = ps3
        kp3 = -mu2 * ys3 - qv[k0 + 1] * yd
        # stage 4
        ys4 = y + h * ky3
        ps4 = p + h * kp3
        d = lag[k0 + 2]
        yd = ys4 if d == 0.0 else _lagged(x + h - d, i, a, h, ys, ps, ypp0)
        ky4 = ps4
        kp4 = -mu2 * ys4 - qv[k0 + 2] * yd
        ys[i + 1] = y + h * (ky1 + 2.0 * ky2 + 2.0 * ky3 + ky4) / 6.0
        ps[i + 1] = p + h * (kp1 + 2.0 * kp2 + 2.0 * kp3 + kp4) / 6.0


@dataclass(frozen=True, eq=False)
class SolutionSegment:
    segment: SegmentId
    mu: float
    nodes: np.ndarray
    values: np.ndarray
    derivs: np.ndarray

    @cached_property
    def interpolant(self) -> CubicHermiteSpline:
        return CubicHermiteSpline(self.nodes, self.values, self.derivs, extrapolate=False)

    def __call__(self, x):
        """``(w, w')`` at points of the segment closure."""
        spl = self.interpolant
        return spl(x), spl(x, 1)

    @property
    def step(self) -> float:
        return float(self.nodes[1] - self.nodes[0])


@dataclass(frozen=True, eq=False)
class PiecewiseSolution:
    s1: SolutionSegment
    s2: SolutionSegment
    s3: SolutionSegment
    mu: float
    delta: float
    theta: float

    @property
    def segments(self) -> tuple[SolutionSegment, SolutionSegment, SolutionSegment]:
        return (self.s1, self.s2, self.s3)

    @property
    def h1(self) -> float:
        return float(self.s1.nodes[-1])

    @property
    def h2(self) -> float:
        return float(self.s2.nodes[-1])

    def transmission_residuals(self) -> tuple[float, float, float, float]:
        """``|w(h-0) - c w(h+0)|`` and the same for ``w'`` at h1 (c=delta), h2 (c=theta)."""
        s1, s2, s3 = self.segments
        return (
            abs(s1.values[-1] - self.delta * s2.values[0]),
            abs(s1.derivs[-1] - self.delta * s2.derivs[0]),
            abs(s2.values[-1] - self.theta * s3.values[0]),
            abs(s2.derivs[-1] - self.theta * s3.derivs[0]),
        )


def integrate_segment(spec: ProblemSpec, mu: float, seg: SegmentId, y0: float,
                      dy0: float) -> SolutionSegment:
    """RK4 solution on one segment from data ``(y0, dy0)`` at its left end."""
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu!r}")
    if not (np.isfinite(y0) and np.isfinite(dy0)):
        raise IntegrationError("non-finite initial data")
    seg = SegmentId(seg)
    a, b = spec.bounds(seg)
    n = spec.numerics.steps(mu, b - a)
    h = (b - a) / n
    xh = a + 0.5 * h * np.arange(2 * n + 1)
    xh[-1] = b
    qv = np.ascontiguousarray(spec.q.on_segment(seg, xh), dtype=float)
    lag = np.ascontiguousarray(spec.retard.on_segment(seg, xh), dtype=float)
    z = xh - lag
    if np.any(lag < 0) or np.any(z < a - 1e-12 * max(1.0, b)):
        raise IntegrationError(
            f"retarded argument leaves {seg.name}: min(x - retard) = {z.min():.6g} < {a:.6g}"
        )
    ys = np.empty(n + 1)
    ps = np.empty(n + 1)
    _rk4_delay(a, h, n, mu * mu, qv, lag, float(y0), float(dy0), ys, ps)
    if not (np.isfinite(ys[-1]) and np.isfinite(ps[-1])):
        raise IntegrationError(f"solution overflowed on {seg.name} at mu={mu!r}")
    nodes = a + h * np.arange(n + 1)
    nodes[-1] = b
    return SolutionSegment(seg, float(mu), nodes, ys, ps)


def solve_w(spec: ProblemSpec, mu: float) -> PiecewiseSolution:
    """The shooting solution ``w(x, mu)`` with ``w(0) = 1``, ``w'(0) = -mu``."""
    s1 = integrate_segment(spec, mu, SegmentId.S1, 1.0, -mu)
    s2 = integrate_segment(spec, mu, SegmentId.S2,
                           s1.values[-1] / spec.delta, s1.derivs[-1] / spec.delta)
    s3 = integrate_segment(spec, mu, SegmentId.S3,
                           s2.values[-1] / spec.theta, s2.derivs[-1] / spec.theta)
    return PiecewiseSolution(s1, s2, s3, float(mu), spec.delta, spec.theta)


def eval_solution(sol: PiecewiseSolution, x, side: Side | None = None):
    """``(w, w')`` at ``x``; ``side`` resolves the transmission points."""
    xa = np.asarray(x, dtype=float)
    h1, h2 = sol.h1, sol.h2
    if xa.ndim == 0:
        seg = segment_of(float(xa), h1, h2, side)
        s = sol.segments[seg]
        if xa == s.nodes[0]:
            return float(s.values[0]), float(s.derivs[0])
        if xa == s.nodes[-1]:
            return float(s.values[-1]), float(s.derivs[-1])
        v, d = s(xa)
        return float(v), float(d)
    if np.any((xa < 0) | (xa > PI)):
        raise ValueError("points outside [0, pi]")
    segs = segment_ids(xa, h1, h2, side)
    val = np.empty_like(xa)
    der = np.empty_like(xa)
    for k, s in enumerate(sol.segments):
        m = segs == k
        if np.any(m):
            val[m], der[m] = s(xa[m])
    return val, der
