"""Vectorised adaptive Simpson quadrature.

Panels are refined breadth-first: every panel whose two-half Simpson estimate
disagrees with the whole-panel estimate is split, so an integrand only costs
evaluations where it needs them.  Several disjoint intervals can be integrated
in one call, which is how running integrals on a grid are assembled.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

Integrand = Callable[[np.ndarray], np.ndarray]


class QuadratureError(RuntimeError):
    """Raised when refinement hits the panel cap before meeting the tolerance."""


def _simpson(fa, fm, fb, width):
    return width * (fa + 4.0 * fm + fb) / 6.0


def adaptive_simpson_intervals(
    f: Integrand,
    edges: np.ndarray,
    tol: float = 1e-10,
    panels: np.ndarray | int = 1,
    max_panels: int = 1 << 22,
) -> np.ndarray:
    """Integrate ``f`` over each interval ``[edges[k], edges[k+1]]``.

    ``panels`` gives the initial number of equal panels per interval (scalar or
    one entry per interval).  ``tol`` is an absolute tolerance on the total; it
    is shared among panels in proportion to their width.
    """
    edges = np.asarray(edges, dtype=float)
    n_int = edges.size - 1
    if n_int < 1:
        return np.zeros(0)
    widths = np.diff(edges)
    if np.any(widths < 0):
        raise ValueError("interval edges must be non-decreasing")
    total = float(edges[-1] - edges[0])
    out = np.zeros(n_int)
    if total == 0.0:
        return out

    counts = np.broadcast_to(np.asarray(panels, dtype=np.int64), (n_int,))
    counts = np.maximum(counts, 1)
    owner = np.repeat(np.arange(n_int), counts)
    # panel k of interval j spans edges[j] + (k, k+1) * width_j / count_j
    local = np.arange(owner.size) - np.repeat(np.cumsum(counts) - counts, counts)
    step = widths[owner] / counts[owner]
    lo = edges[owner] + local * step
    hi = lo + step
    keep = hi > lo
    lo, hi, owner = lo[keep], hi[keep], owner[keep]
    ptol = tol * (hi - lo) / total

    evaluated = 0
    while lo.size:
        evaluated += lo.size
        if evaluated > max_panels:
            raise QuadratureError(
                f"adaptive Simpson exceeded {max_panels} panels "
                f"({lo.size} still unresolved)"
            )
        mid = 0.5 * (lo + hi)
        q1 = 0.5 * (lo + mid)
        q3 = 0.5 * (mid + hi)
        vals = f(np.concatenate([lo, q1, mid, q3, hi]))
        fa, f1, fm, f3, fb = np.split(np.asarray(vals, dtype=float), 5)
        width = hi - lo
        whole = _simpson(fa, fm, fb, width)
        halves = _simpson(fa, f1, fm, 0.5 * width) + _simpson(fm, f3, fb, 0.5 * width)
        err = halves - whole
        if not np.all(np.isfinite(halves)):
            raise QuadratureError("integrand returned non-finite values")
        done = np.abs(err) <= 15.0 * ptol
        # the smallest representable panels are accepted as they stand
        done |= width <= 1e-13 * max(1.0, abs(total))
        np.add.at(out, owner[done], halves[done] + err[done] / 15.0)
        split = ~done
        lo, mid, hi = lo[split], mid[split], hi[split]
        owner, ptol = owner[split], ptol[split]
        lo = np.concatenate([lo, mid])
        hi = np.concatenate([mid, hi])
        owner = np.concatenate([owner, owner])
        ptol = np.concatenate([0.5 * ptol, 0.5 * ptol])
    return out


def adaptive_simpson(
    f: Integrand, a: float, b: float, tol: float = 1e-10, panels: int = 1,
    max_panels: int = 1 << 22,
) -> float:
    """Integral of ``f`` over ``[a, b]`` (``a <= b``)."""
    if b < a:
        return -adaptive_simpson(f, b, a, tol, panels, max_panels)
    return float(adaptive_simpson_intervals(f, np.array([a, b]), tol, panels, max_panels)[0])
