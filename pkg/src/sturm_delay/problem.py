"""Problem instances: piecewise coefficients, numerics settings and validation.

The interval ``[0, pi]`` is cut at ``h1`` and ``h2`` into three segments.  Every
coefficient is described separately on each segment, so one-sided limits at
the joints are simply the values of the neighbouring descriptors there.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields, replace
from enum import IntEnum
from pathlib import Path
from typing import Any, Literal, Union

import numpy as np
from scipy.interpolate import PchipInterpolator

from .quadrature import adaptive_simpson

Side = Literal["left", "right"]

PI = math.pi


class ProblemError(ValueError):
    """Structural problem with a problem definition (hard failure)."""


class SegmentId(IntEnum):
    S1 = 0
    S2 = 1
    S3 = 2


# ---------------------------------------------------------------------------
# segment descriptors


@dataclass(frozen=True)
class Constant:
    value: float

    kind = "constant"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.full_like(x, self.value)

    def params(self) -> dict:
        return {"value": self.value}


@dataclass(frozen=True)
class Poly:
    """``c0 + c1 x + ... + ck x^k`` in the absolute coordinate ``x``."""

    coeffs: tuple[float, ...]

    kind = "poly"

    def __post_init__(self):
        if len(self.coeffs) == 0:
            raise ProblemError("poly descriptor needs at least one coefficient")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.polynomial.polynomial.polyval(x, self.coeffs) + np.zeros_like(x)

    def params(self) -> dict:
        return {"coeffs": list(self.coeffs)}


@dataclass(frozen=True)
class Sinusoid:
    """``a cos(b x + c) + d``."""

    a: float = 1.0
    b: float = 1.0
    c: float = 0.0
    d: float = 0.0

    kind = "sinusoid"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.a * np.cos(self.b * x + self.c) + self.d

    def params(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c, "d": self.d}


@dataclass(frozen=True, eq=False)
class Table:
    """Sampled values joined by monotone (PCHIP) cubic interpolation."""

    x: tuple[float, ...]
    f: tuple[float, ...]

    kind = "table"

    def __post_init__(self):
        xs = np.asarray(self.x, dtype=float)
        fs = np.asarray(self.f, dtype=float)
        if xs.ndim != 1 or xs.shape != fs.shape or xs.size < 2:
            raise ProblemError("table needs matching x/f lists with at least 2 points")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(fs))):
            raise ProblemError("table entries must be finite")
        if np.any(np.diff(xs) <= 0):
            raise ProblemError("table abscissae must be strictly increasing")
        object.__setattr__(self, "_interp", PchipInterpolator(xs, fs, extrapolate=True))

    def __call__(self, x):
        return self._interp(np.asarray(x, dtype=float))

    def params(self) -> dict:
        return {"x": list(self.x), "f": list(self.f)}


SegmentFunction = Union[Constant, Poly, Sinusoid, Table]

_PARAM_KEYS = {
    "constant": ({"value"}, set()),
    "poly": ({"coeffs"}, set()),
    "sinusoid": (set(), {"a", "b", "c", "d"}),
    "table": ({"x", "f"}, set()),
}


def descriptor_from_dict(d: dict) -> SegmentFunction:
    _reject_unknown(d, {"kind", "params"}, "segment descriptor")
    kind = d.get("kind")
    if kind not in _PARAM_KEYS:
        raise ProblemError(f"unknown descriptor kind {kind!r}")
    params = d.get("params", {})
    if not isinstance(params, dict):
        raise ProblemError("descriptor params must be an object")
    required, optional = _PARAM_KEYS[kind]
    _reject_unknown(params, required | optional, f"{kind} params")
    missing = required - params.keys()
    if missing:
        raise ProblemError(f"{kind} params missing {sorted(missing)}")
    try:
        if kind == "constant":
            return Constant(float(params["value"]))
        if kind == "poly":
            return Poly(tuple(float(c) for c in params["coeffs"]))
        if kind == "sinusoid":
            return Sinusoid(**{k: float(v) for k, v in params.items()})
        return Table(tuple(float(v) for v in params["x"]), tuple(float(v) for v in params["f"]))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ProblemError):
            raise
        raise ProblemError(f"bad {kind} params: {exc}") from exc


def _reject_unknown(d: dict, allowed: set, where: str) -> None:
    if not isinstance(d, dict):
        raise ProblemError(f"{where} must be an object")
    extra = set(d) - allowed
    if extra:
        raise ProblemError(f"unknown keys in {where}: {sorted(extra)}")


# ---------------------------------------------------------------------------
# piecewise functions


@dataclass(frozen=True)
class PiecewiseFunction:
    segments: tuple[SegmentFunction, SegmentFunction, SegmentFunction]
    h1: float
    h2: float

    def __post_init__(self):
        if len(self.segments) != 3:
            raise ProblemError("a piecewise function needs exactly three segments")
        for seg, desc in zip(SegmentId, self.segments):
            if isinstance(desc, Table):
                a, b = self.bounds(seg)
                span = max(1.0, b - a) * 1e-12
                if desc.x[0] > a + span or desc.x[-1] < b - span:
                    raise ProblemError(
                        f"table on {seg.name} must span [{a:.6g}, {b:.6g}]"
                    )

    def bounds(self, seg: SegmentId) -> tuple[float, float]:
        return ((0.0, self.h1), (self.h1, self.h2), (self.h2, PI))[seg]

    def on_segment(self, seg: SegmentId, x):
        """Evaluate the descriptor owning ``seg`` (valid on its closure)."""
        return self.segments[seg](x)

    def __call__(self, x, side: Side | None = None):
        return eval_piecewise(self, x, side)


def segment_of(x: float, h1: float, h2: float, side: Side | None = None) -> SegmentId:
    if not (0.0 <= x <= PI):
        raise ValueError(f"x={x!r} lies outside [0, pi]")
    if x == h1 or x == h2:
        if side not in ("left", "right"):
            raise ValueError(f"x={x!r} is a transmission point; pass side='left' or 'right'")
        if x == h1:
            return SegmentId.S1 if side == "left" else SegmentId.S2
        return SegmentId.S2 if side == "left" else SegmentId.S3
    if x < h1:
        return SegmentId.S1
    if x < h2:
        return SegmentId.S2
    return SegmentId.S3


def eval_piecewise(f: PiecewiseFunction, x, side: Side | None = None):
    """Value of ``f`` at ``x``; ``side`` picks the one-sided limit at ``h1``/``h2``.

    Accepts scalars or arrays; for arrays ``side`` applies to every point that
    sits exactly on a joint.
    """
    xa = np.asarray(x, dtype=float)
    if xa.ndim == 0:
        seg = segment_of(float(xa), f.h1, f.h2, side)
        return float(f.on_segment(seg, xa))
    out = np.empty_like(xa)
    segs = segment_ids(xa, f.h1, f.h2, side)
    for seg in SegmentId:
        m = segs == seg
        if np.any(m):
            out[m] = f.on_segment(seg, xa[m])
    return out


def segment_ids(x: np.ndarray, h1: float, h2: float, side: Side | None = None) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any((x < 0.0) | (x > PI)):
        raise ValueError("points outside [0, pi]")
    on_joint = (x == h1) | (x == h2)
    if np.any(on_joint) and side not in ("left", "right"):
        raise ValueError("grid hits a transmission point; pass side='left' or 'right'")
    segs = np.where(x < h1, 0, np.where(x < h2, 1, 2))
    if side == "left":
        segs = np.where(x == h1, 0, np.where(x == h2, 1, segs))
    return segs


# ---------------------------------------------------------------------------
# problem specification


@dataclass(frozen=True)
class NumericsConfig:
    steps_per_unit_mu: int = 256
    min_steps_per_segment: int = 400
    root_tol: float = 1e-9
    picard_tol: float = 1e-12
    picard_max_iter: int = 200
    quad_panels_base: int = 16
    validation_samples: int = 2048

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not (v > 0) or not math.isfinite(v):
                raise ProblemError(f"numerics.{f.name} must be positive, got {v!r}")
        for name in ("steps_per_unit_mu", "min_steps_per_segment", "picard_max_iter",
                     "quad_panels_base", "validation_samples"):
            if int(getattr(self, name)) != getattr(self, name):
                raise ProblemError(f"numerics.{name} must be an integer")

    def steps(self, mu: float, length: float) -> int:
        """Number of RK4 steps used on a segment of the given length."""
        return max(self.min_steps_per_segment,
                   math.ceil(self.steps_per_unit_mu * mu * length))


@dataclass(frozen=True)
class ProblemSpec:
    h1: float
    h2: float
    delta: float
    theta: float
    q: PiecewiseFunction
    retard: PiecewiseFunction
    numerics: NumericsConfig = field(default_factory=NumericsConfig)

    def __post_init__(self):
        for name in ("h1", "h2", "delta", "theta"):
            if not math.isfinite(getattr(self, name)):
                raise ProblemError(f"{name} must be finite")
        if not (0.0 < self.h1 < self.h2 < PI):
            raise ProblemError(
                f"need 0 < h1 < h2 < pi, got h1={self.h1!r}, h2={self.h2!r}"
            )
        if self.delta == 0.0:
            raise ProblemError("delta must be nonzero")
        if self.theta == 0.0:
            raise ProblemError("theta must be nonzero")
        for name in ("q", "retard"):
            pf = getattr(self, name)
            if (pf.h1, pf.h2) != (self.h1, self.h2):
                raise ProblemError(f"{name} is defined with different transmission points")

    @classmethod
    def build(cls, h1, h2, delta, theta, q, retard, numerics=None) -> "ProblemSpec":
        """Convenience constructor taking three descriptors each for q and retard."""
        return cls(
            float(h1), float(h2), float(delta), float(theta),
            PiecewiseFunction(tuple(q), float(h1), float(h2)),
            PiecewiseFunction(tuple(retard), float(h1), float(h2)),
            numerics or NumericsConfig(),
        )

    def bounds(self, seg: SegmentId) -> tuple[float, float]:
        return self.q.bounds(seg)

    def with_numerics(self, **changes) -> "ProblemSpec":
        return replace(self, numerics=replace(self.numerics, **changes))

    def q_abs_integrals(self) -> tuple[float, float, float]:
        """Segment integrals of ``|q|`` (the contraction constants q1, q2, q3)."""
        out = []
        for seg in SegmentId:
            a, b = self.bounds(seg)
            desc = self.q.segments[seg]
            out.append(adaptive_simpson(lambda t: np.abs(desc(t)), a, b, tol=1e-12, panels=64))
        return tuple(out)

    def to_dict(self) -> dict:
        def pf(p):
            return {f"s{i + 1}": {"kind": d.kind, "params": d.params()}
                    for i, d in enumerate(p.segments)}

        return {
            "h1": self.h1, "h2": self.h2, "delta": self.delta, "theta": self.theta,
            "q": pf(self.q), "retard": pf(self.retard),
            "numerics": {f.name: getattr(self.numerics, f.name) for f in fields(self.numerics)},
        }


def spec_from_dict(d: dict) -> ProblemSpec:
    """Build a problem from the JSON document layout (unknown keys rejected)."""
    _reject_unknown(d, {"h1", "h2", "delta", "theta", "q", "retard", "numerics"}, "problem")
    missing = {"h1", "h2", "delta", "theta", "q", "retard"} - d.keys()
    if missing:
        raise ProblemError(f"problem missing keys {sorted(missing)}")
    try:
        h1, h2 = float(d["h1"]), float(d["h2"])
        delta, theta = float(d["delta"]), float(d["theta"])
    except (TypeError, ValueError) as exc:
        raise ProblemError(f"h1, h2, delta, theta must be numbers: {exc}") from exc

    def pf(name):
        block = d[name]
        _reject_unknown(block, {"s1", "s2", "s3"}, name)
        if set(block) != {"s1", "s2", "s3"}:
            raise ProblemError(f"{name} needs descriptors s1, s2 and s3")
        return [descriptor_from_dict(block[k]) for k in ("s1", "s2", "s3")]

    num = d.get("numerics", {})
    allowed = {f.name for f in fields(NumericsConfig)}
    _reject_unknown(num, allowed, "numerics")
    numerics = NumericsConfig(**num)
    if h1 >= h2:
        # checked again by ProblemSpec; fail before building tables against bad joints
        raise ProblemError(f"need 0 < h1 < h2 < pi, got h1={h1!r}, h2={h2!r}")
    return ProblemSpec.build(h1, h2, delta, theta, pf("q"), pf("retard"), numerics)


def load_spec(path: str | Path) -> ProblemSpec:
    """Read a problem file.  ``OSError``/``json.JSONDecodeError`` propagate."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return spec_from_dict(data)


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    worst: float
    advisory: bool = False
    detail: str = ""

    @property
    def status(self) -> str:
        return "PASS" if self.passed else "FAIL"


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[Check, ...]

    @property
    def ok(self) -> bool:
        """All assumptions needed by the solver hold."""
        return all(c.passed for c in self.checks if not c.advisory)

    @property
    def conditions_ab(self) -> bool:
        """The smoothness/retard hypotheses behind the refined asymptotics hold."""
        return all(c.passed for c in self.checks if c.advisory)

    def format(self) -> str:
        lines = []
        for c in self.checks:
            tag = " (advisory)" if c.advisory else ""
            extra = f"  {c.detail}" if c.detail else ""
            lines.append(f"{c.status}  {c.name}{tag}  worst={c.worst:.6g}{extra}")
        return "\n".join(lines)


_SLACK = 1e-12


def validate_problem(spec: ProblemSpec) -> ValidationReport:
    """Sample the standing assumptions and conditions a)/b).

    Required checks: ``retard >= 0`` and ``x - retard(x)`` not reaching back
    past the start of the owning segment.  Advisory checks (conditions a/b):
    finite sampled ``q'`` and ``retard''``, ``retard' <= 1`` and ``retard``
    vanishing at 0 and at the right limits of ``h1`` and ``h2``.
    """
    m = spec.numerics.validation_samples
    neg = []
    reach = []
    slope = []
    dq_max = []
    d2_max = []
    for seg in SegmentId:
        a, b = spec.bounds(seg)
        x = np.linspace(a, b, max(m, 3))
        r = spec.retard.on_segment(seg, x)
        qv = spec.q.on_segment(seg, x)
        g = x[1] - x[0]
        neg.append(float(np.max(-r)))
        # positive = violation of x - retard(x) >= a
        viol = a - (x - r)
        worst_i = int(np.argmax(viol))
        reach.append((float(viol[worst_i]), float(x[worst_i]), seg))
        dr = (r[2:] - r[:-2]) / (2 * g)
        slope.append(float(np.max(dr)))
        dq_max.append(float(np.max(np.abs((qv[2:] - qv[:-2]) / (2 * g)))))
        d2_max.append(float(np.max(np.abs((r[2:] - 2 * r[1:-1] + r[:-2]) / g**2))))

    checks = []
    worst_neg = max(neg)
    checks.append(Check("retard >= 0", worst_neg <= _SLACK, max(worst_neg, 0.0) + 0.0))
    for (v, xv, seg), label in zip(reach, ("x - retard(x) >= 0 on S1",
                                           "x - retard(x) >= h1 on S2",
                                           "x - retard(x) >= h2 on S3")):
        checks.append(Check(label, v <= _SLACK, max(v, 0.0),
                            detail=f"at x={xv:.6g}" if v > _SLACK else ""))

    smooth = max(max(dq_max), max(d2_max))
    checks.append(Check("q' and retard'' bounded (sampled)", bool(np.isfinite(smooth)),
                        smooth, advisory=True))
    s = max(slope)
    checks.append(Check("retard' <= 1", s <= 1.0 + 1e-9, s, advisory=True))
    ends = [abs(float(spec.retard.on_segment(seg, spec.bounds(seg)[0]))) for seg in SegmentId]
    e = max(ends)
    checks.append(Check("retard(0) = retard(h1+0) = retard(h2+0) = 0", e <= 1e-10, e,
                        advisory=True))
    return ValidationReport(tuple(checks))
