"""Closed-form large-N expressions for eigenvalues and eigenfunctions.

Integrals over ``[0, x]`` are split at ``h1`` and ``h2``; each piece uses the
descriptors of its own segment so the one-sided limits at the joints are the
right ones.  ``N' = N + 1/4`` throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .problem import PI, ProblemSpec, SegmentId, Side, segment_ids
from .quadrature import adaptive_simpson_intervals

SQRT2 = math.sqrt(2.0)
QUAD_TOL = 1e-10


def mu_leading(N: int) -> float:
    if N < 1:
        raise ValueError("N must be a positive integer")
    return N + 0.25


def _max_retard(spec: ProblemSpec) -> float:
    r = 0.0
    for seg in SegmentId:
        a, b = spec.bounds(seg)
        r = max(r, float(np.max(spec.retard.on_segment(seg, np.linspace(a, b, 129)))))
    return r


def _running_integrals(spec: ProblemSpec, kernel, xs: np.ndarray, freq: float) -> np.ndarray:
    """``int_0^x q(t) kernel(seg, t) dt`` for every ``x`` in ``xs`` (any order).

    ``kernel(seg, t)`` returns the factor multiplying ``q`` on that segment.
    ``freq`` is the angular frequency of the kernel, used to size the base panels.
    """
    xs = np.asarray(xs, dtype=float)
    flat = xs.ravel()
    if np.any((flat < 0) | (flat > PI)):
        raise ValueError("points outside [0, pi]")
    xmax = float(flat.max()) if flat.size else 0.0
    joints = np.array([0.0, spec.h1, spec.h2])
    edges = np.unique(np.concatenate([joints[joints < xmax], flat, [0.0]]))
    parts = np.zeros(max(edges.size - 1, 0))
    if parts.size:
        owner = segment_ids(0.5 * (edges[:-1] + edges[1:]), spec.h1, spec.h2)
        base = spec.numerics.quad_panels_base
        for seg in SegmentId:
            idx = np.flatnonzero(owner == seg)
            if idx.size == 0:
                continue
            a, b = spec.bounds(seg)
            sub = np.append(edges[idx], edges[idx[-1] + 1])
            qd = spec.q.segments[seg]

            def f(t, seg=seg, qd=qd):
                return qd(t) * kernel(seg, t)

            seg_panels = base * (1 + math.ceil(freq * (b - a)))
            panels = np.maximum(1, np.ceil(seg_panels * np.diff(sub) / (b - a))).astype(np.int64)
            tol = QUAD_TOL * (sub[-1] - sub[0]) / PI
            parts[idx] = adaptive_simpson_intervals(f, sub, tol, panels)
    cum = np.concatenate([[0.0], np.cumsum(parts)])
    return cum[np.searchsorted(edges, flat)].reshape(xs.shape)


def q_delay_integral(spec: ProblemSpec, N: int) -> float:
    """``Q_N = int_0^pi q(t) cos(N' retard(t)) dt``."""
    nq = mu_leading(N)
    ker = lambda seg, t: np.cos(nq * spec.retard.on_segment(seg, t))
    return float(_running_integrals(spec, ker, np.array([PI]), nq * _max_retard(spec))[0])


@dataclass(frozen=True)
class AsymptoticEigen:
    N: int
    mu_lead: float
    bracket: float
    shift: float
    mu_asym: float
    Q_N: float


def mu_refined(spec: ProblemSpec, N: int) -> AsymptoticEigen:
    """``N' - 2 (2 + Q_N) / (pi (4N + 1))``."""
    lead = mu_leading(N)
    Q = q_delay_integral(spec, N)
    bracket = 2.0 + Q
    shift = -2.0 / (PI * (4 * N + 1)) * bracket
    return AsymptoticEigen(N, lead, bracket, shift, lead + shift, Q)


def _prefactors(spec: ProblemSpec) -> np.ndarray:
    return np.array([1.0, 1.0 / spec.delta, 1.0 / (spec.delta * spec.theta)])


def eigenfunction_first_order(spec: ProblemSpec, mu: float, x, side: Side | None = None):
    """``c_i sqrt(2) cos(pi/4 + mu x)`` with ``c = 1, 1/delta, 1/(delta theta)``."""
    if not mu > 0:
        raise ValueError("mu must be positive")
    xa = np.asarray(x, dtype=float)
    pre = _prefactors(spec)[segment_ids(np.atleast_1d(xa), spec.h1, spec.h2, side)]
    val = pre * SQRT2 * np.cos(PI / 4 + mu * np.atleast_1d(xa))
    return float(val[0]) if xa.ndim == 0 else val.reshape(xa.shape)


def eigenfunction_refined(spec: ProblemSpec, N: int, x, side: Side | None = None):
    """Second-order eigenfunction expression, transcribed term for term.

    With ``S(x) = int_0^x q sin(N' retard)``, ``C(x) = int_0^x q cos(N' retard)``
    and ``K = 2x (2 + Q_N) / (pi (4N + 1))``::

        u(x) = c_i { cos(N'x) [1 + (S - C)/(2N)] + K cos(N'x)
                    - sin(N'x) [1 + (S - C)/(2N)] + K sin(N'x) }

    where ``c_i`` is 1, ``1/delta`` or ``1/(delta theta)`` by segment.
    """
    if N < 1:
        raise ValueError("N must be a positive integer")
    nq = N + 0.25
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    segs = segment_ids(xa, spec.h1, spec.h2, side)
    freq = nq * _max_retard(spec)
    ret = spec.retard
    S = _running_integrals(spec, lambda seg, t: np.sin(nq * ret.on_segment(seg, t)), xa, freq)
    C = _running_integrals(spec, lambda seg, t: np.cos(nq * ret.on_segment(seg, t)), xa, freq)
    Q = q_delay_integral(spec, N)
    bracket = 1.0 + (S - C) / (2 * N)
    K = 2 * xa / (PI * (4 * N + 1)) * (2.0 + Q)
    cx, sx = np.cos(nq * xa), np.sin(nq * xa)
    core = cx * bracket + cx * K - sx * bracket + sx * K
    val = _prefactors(spec)[segs] * core
    return float(val[0]) if np.ndim(x) == 0 else val.reshape(np.shape(x))


@dataclass(frozen=True)
class DecayReport:
    mu: tuple[float, ...]
    cos_integral: tuple[float, ...]
    sin_integral: tuple[float, ...]
    scaled: tuple[float, ...]
    max_scaled: float
    advisory: bool


def oscillatory_integrals(spec: ProblemSpec, mu: float, x: float = PI) -> tuple[float, float]:
    """``int_0^x q cos mu(2t - retard)`` and the matching sine integral."""
    ret = spec.retard
    freq = 2 * mu + mu * _max_retard(spec)
    ic = _running_integrals(
        spec, lambda seg, t: np.cos(mu * (2 * t - ret.on_segment(seg, t))), np.array([x]), freq)
    is_ = _running_integrals(
        spec, lambda seg, t: np.sin(mu * (2 * t - ret.on_segment(seg, t))), np.array([x]), freq)
    return float(ic[0]), float(is_[0])


def check_oscillatory_decay(spec: ProblemSpec, mu_list, advisory: bool = False) -> DecayReport:
    """``mu * |integral|`` for both oscillatory integrals at ``x = pi``.

    ``advisory`` marks results for problems where conditions a)/b) fail.
    """
    mus, cs, ss, sc = [], [], [], []
    for mu in mu_list:
        ic, is_ = oscillatory_integrals(spec, float(mu))
        mus.append(float(mu))
        cs.append(ic)
        ss.append(is_)
        sc.append(float(mu) * max(abs(ic), abs(is_)))
    return DecayReport(tuple(mus), tuple(cs), tuple(ss), tuple(sc),
                       max(sc) if sc else 0.0, advisory)
