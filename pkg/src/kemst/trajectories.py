"""Single-point motions over a finite horizon.

A trajectory maps time t in [0, T] to a point in R^d. Three kinds are
supported:

* ``polynomial`` -- one power-basis coefficient list per coordinate,
* ``rational`` -- per coordinate, a sum of numerator/denominator pairs
  (kept as separate additive terms so bump-shaped motions evaluate
  without catastrophic cancellation),
* ``scripted`` -- an ordered list of linear or circular-arc segments
  that tile [0, T].

All arithmetic is plain binary64.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ParameterError, UnsupportedKindError

_CONTINUITY_TOL = 1e-9


def polyval(coeffs, t):
    """Horner evaluation of ascending power-basis coefficients."""
    acc = 0.0
    if np.ndim(t) > 0:
        acc = np.zeros_like(np.asarray(t, dtype=float))
    for c in reversed(coeffs):
        acc = acc * t + c
    return acc


def polyder(coeffs):
    """Coefficients of the derivative (ascending power basis)."""
    return tuple(i * c for i, c in enumerate(coeffs))[1:] or (0.0,)


@dataclass(frozen=True)
class LinearSegment:
    t0: float
    t1: float
    start: tuple[float, ...]
    end: tuple[float, ...]

    def at(self, t):
        u = 0.0 if self.t1 == self.t0 else (t - self.t0) / (self.t1 - self.t0)
        s = np.asarray(self.start, dtype=float)
        e = np.asarray(self.end, dtype=float)
        return s + u * (e - s)

    def position(self, which):
        return np.asarray(self.start if which == 0 else self.end, dtype=float)


@dataclass(frozen=True)
class ArcSegment:
    """Constant-angular-rate motion on a circle (2-D only)."""

    t0: float
    t1: float
    center: tuple[float, float]
    radius: float
    angle0: float
    angle1: float

    def at(self, t):
        u = 0.0 if self.t1 == self.t0 else (t - self.t0) / (self.t1 - self.t0)
        a = self.angle0 + u * (self.angle1 - self.angle0)
        cx, cy = self.center
        return np.array([cx + self.radius * math.cos(a), cy + self.radius * math.sin(a)])

    def position(self, which):
        a = self.angle0 if which == 0 else self.angle1
        cx, cy = self.center
        return np.array([cx + self.radius * math.cos(a), cy + self.radius * math.sin(a)])


@dataclass(frozen=True)
class Trajectory:
    """One point's motion over [0, horizon] in R^dim."""

    kind: str
    dim: int
    horizon: float
    coeffs: tuple[tuple[float, ...], ...] = ()
    terms: tuple[tuple[tuple[tuple[float, ...], tuple[float, ...]], ...], ...] = ()
    segments: tuple = ()
    clamp_unit: bool = field(default=False)

    def __post_init__(self):
        if self.horizon <= 0:
            raise ParameterError("horizon must be positive")
        if self.kind == "polynomial":
            if len(self.coeffs) != self.dim:
                raise ParameterError("need one coefficient list per coordinate")
        elif self.kind == "rational":
            if len(self.terms) != self.dim:
                raise ParameterError("need one term list per coordinate")
            self._check_denominators()
        elif self.kind == "scripted":
            self._check_segments()
        else:
            raise ParameterError(f"unknown trajectory kind {self.kind!r}")

    def _check_denominators(self):
        # Denominators must stay bounded away from zero on [0, T]; a dense
        # sign/magnitude scan is enough for the families built here.
        ts = np.linspace(0.0, self.horizon, 2049)
        for coord_terms in self.terms:
            for _num, den in coord_terms:
                vals = polyval(den, ts)
                if np.any(np.abs(vals) < 1e-12) or np.min(vals) * np.max(vals) < 0:
                    raise ParameterError("rational denominator vanishes on the horizon")

    def _check_segments(self):
        if not self.segments:
            raise ParameterError("scripted trajectory needs at least one segment")
        if abs(self.segments[0].t0) > _CONTINUITY_TOL:
            raise ParameterError("segments must start at t=0")
        if abs(self.segments[-1].t1 - self.horizon) > _CONTINUITY_TOL:
            raise ParameterError("segments must end at the horizon")
        for a, b in zip(self.segments, self.segments[1:]):
            if abs(a.t1 - b.t0) > _CONTINUITY_TOL:
                raise ParameterError("segments must tile the horizon without gaps")
            if np.linalg.norm(a.position(1) - b.position(0)) > 1e-7:
                raise ParameterError("scripted segments must be continuous")

    def at(self, t: float) -> np.ndarray:
        """Position at time t; raises DomainError outside [0, horizon]."""
        if t < -1e-12 or t > self.horizon + 1e-12:
            raise DomainError(f"t={t} outside [0, {self.horizon}]")
        t = min(max(t, 0.0), self.horizon)
        if self.kind == "polynomial":
            out = np.array([polyval(c, t) for c in self.coeffs], dtype=float)
        elif self.kind == "rational":
            out = np.array(
                [
                    sum(polyval(num, t) / polyval(den, t) for num, den in coord_terms)
                    for coord_terms in self.terms
                ],
                dtype=float,
            )
        else:
            out = self._segment_for(t).at(t)
        if self.clamp_unit:
            out = np.clip(out, 0.0, 1.0)
        return out

    def _segment_for(self, t):
        # Segments are few (tens at most); linear scan is fine.
        for seg in self.segments:
            if t <= seg.t1 + _CONTINUITY_TOL:
                return seg
        return self.segments[-1]

    def sample(self, ts: np.ndarray) -> np.ndarray:
        """Positions at an array of times, shape (len(ts), dim)."""
        return np.array([self.at(float(t)) for t in ts])


def evaluate(traj: Trajectory, t: float) -> np.ndarray:
    """Position of a trajectory at time t (alias of Trajectory.at)."""
    return traj.at(t)


def constant(values, horizon: float) -> Trajectory:
    """A stationary point."""
    vals = tuple(float(v) for v in np.atleast_1d(values))
    return Trajectory(
        kind="polynomial",
        dim=len(vals),
        horizon=horizon,
        coeffs=tuple((v,) for v in vals),
    )


def linear(start, end, horizon: float) -> Trajectory:
    """Constant-velocity motion from start to end over [0, horizon]."""
    s = np.atleast_1d(np.asarray(start, dtype=float))
    e = np.atleast_1d(np.asarray(end, dtype=float))
    return Trajectory(
        kind="polynomial",
        dim=len(s),
        horizon=horizon,
        coeffs=tuple((si, (ei - si) / horizon) for si, ei in zip(s, e)),
    )


def chebyshev_coeffs(s: int) -> tuple[float, ...]:
    """Power-basis coefficients of the degree-s Chebyshev polynomial."""
    if s == 0:
        return (1.0,)
    prev = np.array([1.0])
    cur = np.array([0.0, 1.0])
    for _ in range(s - 1):
        nxt = np.zeros(len(cur) + 1)
        nxt[1:] = 2.0 * cur
        nxt[: len(prev)] -= prev
        prev, cur = cur, nxt
    return tuple(cur)


def unit_chebyshev_coeffs(s: int, horizon: float) -> tuple[float, ...]:
    """Degree-s Chebyshev motion mapped to range [0,1] and domain [0,horizon].

    The affine time map sends t=0 to the polynomial's argument 1, so the
    motion starts at 1.0 and sweeps the full unit range exactly s times.
    """
    if s < 1:
        raise ParameterError("degree must be >= 1")
    sub = np.array([1.0, -2.0 / horizon])  # argument 1 - 2t/T
    prev = np.array([1.0])
    cur = sub.copy()
    for _ in range(s - 1):
        nxt = np.convolve(cur, sub) * 2.0
        nxt[: len(prev)] -= prev
        prev, cur = cur, nxt
    mapped = cur if s >= 1 else prev
    mapped = mapped.copy()
    mapped[0] += 1.0
    return tuple(mapped / 2.0)


def max_speed(traj: Trajectory, grid: int = 4096) -> float:
    """Largest per-coordinate |h'(t)| over the horizon, polynomial kind only.

    Dense sampling plus ternary refinement around every local maximum;
    accurate to ~1e-10 relative for desk-scale degrees.
    """
    if traj.kind != "polynomial":
        raise UnsupportedKindError("max_speed is defined for polynomial trajectories")
    best = 0.0
    ts = np.linspace(0.0, traj.horizon, grid + 1)
    for coord in traj.coeffs:
        der = polyder(coord)
        vals = np.abs(polyval(der, ts))
        best = max(best, float(vals.max()))
        # strict on one side so plateaus (constant derivative) refine nowhere
        interior = np.flatnonzero(
            (vals[1:-1] >= vals[:-2]) & (vals[1:-1] > vals[2:])
        )
        for idx in interior:
            lo, hi = ts[idx], ts[idx + 2]
            for _ in range(60):
                m1 = lo + (hi - lo) / 3.0
                m2 = hi - (hi - lo) / 3.0
                if abs(polyval(der, m1)) < abs(polyval(der, m2)):
                    lo = m1
                else:
                    hi = m2
            best = max(best, abs(polyval(der, 0.5 * (lo + hi))))
    return best


def poly_extrema(coeffs, horizon: float) -> tuple[float, float]:
    """Exact min/max of a univariate polynomial on [0, horizon].

    Critical points via companion-matrix roots of the derivative.
    """
    der = polyder(coeffs)
    candidates = [0.0, horizon]
    trimmed = np.trim_zeros(np.asarray(der, dtype=float), "b")
    if len(trimmed) > 1:
        roots = np.roots(trimmed[::-1])
        for r in roots:
            if abs(r.imag) < 1e-9 and -1e-12 <= r.real <= horizon + 1e-12:
                candidates.append(min(max(r.real, 0.0), horizon))
    vals = [polyval(coeffs, t) for t in candidates]
    return min(vals), max(vals)


def normalize_unit_range(coeffs, horizon: float) -> tuple[float, ...]:
    """Affinely rescale a polynomial so its range on [0, horizon] is [0, 1]."""
    lo, hi = poly_extrema(coeffs, horizon)
    if hi - lo < 1e-12:
        return (0.5,) + (0.0,) * (len(coeffs) - 1)
    scaled = tuple(c / (hi - lo) for c in coeffs)
    return (scaled[0] - lo / (hi - lo),) + scaled[1:]
