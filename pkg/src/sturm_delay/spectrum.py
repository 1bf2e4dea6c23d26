"""Locating the spectral parameters as roots of the normalised characteristic function.

For large ``N`` exactly one root lies in the open window ``|mu - (N + 1/4)| < 1/4``.
``find_eigen_near`` samples that window, brackets sign changes and refines them;
``scan_spectrum`` covers an arbitrary range where no window guarantee is assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .asymptotics import mu_leading, mu_refined
from .characteristic import H_norm
from .problem import ProblemSpec, validate_problem

WINDOW_SAMPLES = 64
WINDOW_EPS = 1e-9
SCAN_DENSITY = 8


class NoRootInWindow(RuntimeError):
    def __init__(self, N: int, nearest: float | None):
        where = f"; nearest sign change near mu={nearest:.9g}" if nearest is not None else ""
        super().__init__(f"no root of H in the window around N={N} + 1/4{where}")
        self.N = N
        self.nearest = nearest


@dataclass(frozen=True)
class EigenRecord:
    N: int
    mu_num: float
    eigenvalue: float
    mu_lead: float
    mu_asym: float
    err_lead: float
    err_asym: float
    scaled_lead: float
    scaled_asym: float
    advisory: bool
    window_hits: int
    residual: float = 0.0
    slope: float = 0.0
    candidates: tuple[float, ...] = field(default=())

    @property
    def accepted(self) -> bool:
        return self.window_hits == 1


@dataclass(frozen=True)
class SpectrumScan:
    mu_lo: float
    mu_hi: float
    roots: tuple[float, ...]
    grid_points: int


def _bisect_secant(f: Callable[[float], float], a: float, b: float, fa: float, fb: float,
                   tol: float) -> tuple[float, float, float]:
    """Root of ``f`` in ``[a, b]`` (``fa * fb <= 0``).

    Bisection down to width ``tol`` then one secant step kept inside the
    bracket.  Returns ``(root, f(root), slope estimate)``.
    """
    if fa == 0.0:
        return a, 0.0, (fb - fa) / (b - a)
    if fb == 0.0:
        return b, 0.0, (fb - fa) / (b - a)
    while b - a > tol:
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0.0:
            return m, 0.0, (fb - fa) / (b - a)
        if (fm < 0) == (fa < 0):
            a, fa = m, fm
        else:
            b, fb = m, fm
    slope = (fb - fa) / (b - a)
    x = b - fb * (b - a) / (fb - fa)
    if not (a <= x <= b):
        x = 0.5 * (a + b)
    fx = f(x)
    return x, fx, slope


def _sign_changes(vals: np.ndarray) -> np.ndarray:
    neg = vals < 0
    return np.flatnonzero(neg[:-1] != neg[1:])


def _refine_all(f, xs, vals, tol) -> list[tuple[float, float, float]]:
    return [_bisect_secant(f, xs[i], xs[i + 1], vals[i], vals[i + 1], tol)
            for i in _sign_changes(vals)]


def find_eigen_near(spec: ProblemSpec, N: int, samples: int = WINDOW_SAMPLES,
                    eps: float = WINDOW_EPS, advisory: bool | None = None) -> EigenRecord:
    """The root of ``H`` near ``N + 1/4``.

    Roots within ``root_tol`` outside a window edge are assigned to this
    window (its centre is the nearer one).  Raises ``NoRootInWindow`` when the
    window has no sign change; several sign changes give a record with
    ``window_hits > 1`` and all candidates listed.
    """
    if N < 1:
        raise ValueError("N must be a positive integer")
    tol = spec.numerics.root_tol
    if advisory is None:
        advisory = not validate_problem(spec).conditions_ab
    f = lambda m: H_norm(spec, m)
    lo, hi = N + eps, N + 0.5 - eps
    xs = np.concatenate([[N - tol], np.linspace(lo, hi, samples), [N + 0.5 + tol]])
    vals = np.array([f(m) for m in xs])
    found = _refine_all(f, xs, vals, tol)
    if not found:
        raise NoRootInWindow(N, _nearest_outside(f, N, tol))
    roots = [r for r, _, _ in found]
    r, fr, slope = found[0]
    asym = mu_refined(spec, N)
    lead = mu_leading(N)
    err_lead = abs(r - lead)
    err_asym = abs(r - asym.mu_asym)
    return EigenRecord(
        N=N, mu_num=r, eigenvalue=r * r, mu_lead=lead, mu_asym=asym.mu_asym,
        err_lead=err_lead, err_asym=err_asym, scaled_lead=N * err_lead, scaled_asym=N * N * err_asym,
        advisory=advisory, window_hits=len(found), residual=abs(fr), slope=slope,
        candidates=tuple(roots),
    )


def _nearest_outside(f, N: int, tol: float) -> float | None:
    # gaps between neighbouring windows: (N - 1/2, N) and (N + 1/2, N + 1)
    best = None
    for lo, hi in ((N - 0.5, N), (N + 0.5, N + 1.0)):
        if lo <= 0:
            continue
        xs = np.linspace(lo, hi, 17)
        vals = np.array([f(m) for m in xs])
        for i in _sign_changes(vals):
            c = 0.5 * (xs[i] + xs[i + 1])
            if best is None or abs(c - (N + 0.25)) < abs(best - (N + 0.25)):
                best = c
    return best


def scan_spectrum(spec: ProblemSpec, mu_lo: float, mu_hi: float,
                  density: int = SCAN_DENSITY) -> SpectrumScan:
    """All sign-change roots of ``H`` in ``[mu_lo, mu_hi]``.

    The base grid has ``density`` points per unit of mu.  Where ``|H|`` has a
    local minimum without a sign change (a possible near-tangency hiding two
    close roots) the two adjacent cells are resampled 16 times finer.
    """
    if not 0 < mu_lo:
        raise ValueError("mu_lo must be positive")
    if mu_hi - mu_lo <= 1e-9:
        return SpectrumScan(mu_lo, mu_hi, (), 0)
    tol = spec.numerics.root_tol
    f = lambda m: H_norm(spec, m)
    n = max(2, math.ceil(density * (mu_hi - mu_lo)) + 1)
    xs = np.linspace(mu_lo, mu_hi, n)
    vals = np.array([f(m) for m in xs])
    absv = np.abs(vals)
    extra_x, extra_v = [], []
    for i in range(1, n - 1):
        if (vals[i - 1] < 0) == (vals[i] < 0) == (vals[i + 1] < 0) and \
                absv[i] < absv[i - 1] and absv[i] < absv[i + 1]:
            fine = np.linspace(xs[i - 1], xs[i + 1], 33)[1:-1]
            extra_x.append(fine)
            extra_v.append(np.array([f(m) for m in fine]))
    if extra_x:
        allx = np.concatenate([xs, *extra_x])
        allv = np.concatenate([vals, *extra_v])
        order = np.argsort(allx, kind="stable")
        xs, vals = allx[order], allv[order]
    roots = sorted(r for r, _, _ in _refine_all(f, xs, vals, tol))
    return SpectrumScan(float(mu_lo), float(mu_hi), tuple(roots), int(xs.size))


@dataclass(frozen=True)
class SimplicityReport:
    root: float
    status: str
    value: float
    slope: float
    relative_slope: float
    sign_change: bool

    @property
    def simple(self) -> bool:
        return self.status == "SIMPLE"


def simplicity_check(spec: ProblemSpec, root: float, h: float = 1e-6,
                     slope_floor: float = 1e-6) -> SimplicityReport:
    """Certify a root as simple: sign change across it and a non-vanishing slope.

    The slope is compared with ``scale / 0.25`` where ``scale`` is the largest
    ``|H_norm|`` on nine points spanning ``root +- 1/4``.  Status is one of
    ``SIMPLE``, ``NOT_SIMPLE`` (no sign change), ``INCONCLUSIVE`` (slope below
    the floor) or ``NOT_A_ROOT`` (precondition violated).
    """
    f = lambda m: H_norm(spec, m)
    around = [f(m) for m in np.linspace(max(root - 0.25, 1e-3), root + 0.25, 9)]
    scale = max(max(abs(v) for v in around), 1e-300)
    v0 = f(root)
    vm, vp = f(root - h), f(root + h)
    slope = (vp - vm) / (2 * h)
    rel = abs(slope) * 0.25 / scale
    sign_change = (vm < 0) != (vp < 0)
    # |H_norm| must be tiny on the scale of its local oscillation
    if abs(v0) > 1e-6 * scale:
        status = "NOT_A_ROOT"
    elif not sign_change:
        status = "NOT_SIMPLE"
    elif rel < slope_floor:
        status = "INCONCLUSIVE"
    else:
        status = "SIMPLE"
    return SimplicityReport(float(root), status, v0, slope, rel, sign_change)
