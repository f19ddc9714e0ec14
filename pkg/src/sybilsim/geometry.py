"""Planar geometry for the two-edge feasibility interval.

Everything here lives in a local frame whose x axis runs through the two
edge nodes that observed a member node: e1 sits at (+c, 0) and e2 at
(-c, 0).  A node heard at distances (d1, d2) from (e1, e2) localizes to an
abscissa x1 and a squared ordinate y1sq; the sign of the ordinate is
unobservable from two distances and never needed, because every quantity
downstream depends on y only through y^2.

The detector's core question: given a start position and a motion budget r
(the farthest the node can travel between observation rounds), what values
can the squared distance ratio k = d2^2/d1^2 take anywhere on the closed
reachability disk?  Level sets of k are the coaxial (Apollonius) circles of
the two edge positions, so the extrema over the disk occur where a member
of that circle family is tangent to the disk boundary.  Writing the circle
of parameter k via the substitution t = (k+1)/(k-1) (center (t*c, 0),
radius c*sqrt(t^2-1)) and squaring the tangency condition twice yields a
quadratic in t whose two roots map back to the extreme ratios.  Raising the
inverse ratio to alpha/2 turns the k interval into the feasible band for
the next observed RSSI ratio eta = (d1/d2)^alpha.

A brute-force oracle (dense boundary sampling plus a derivative-free local
refinement) double-checks the closed form; the two routes are kept fully
independent on purpose.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

__all__ = [
    "Position",
    "LocalFrame",
    "IntervalInputs",
    "RatioInterval",
    "DegenerateFrame",
    "InconsistentDistances",
    "euclidean_distance",
    "make_frame",
    "localize",
    "distance_ratio_sq_extrema",
    "rssi_ratio_interval",
    "ratio_interval_oracle",
]

# Absolute tolerance (in meters^2) below which a slightly negative squared
# ordinate from localization is treated as float noise and clamped to zero.
LOCALIZE_TOLERANCE = 1e-9

# Relative slack used by interval membership tests.  The protocol relies on
# "the current ratio always lies in its own feasibility interval", which is
# exact in real arithmetic but can be off by a few ulps in floats.
CONTAINS_REL_TOL = 1e-9


class DegenerateFrame(ValueError):
    """Raised when a local frame cannot be built (coincident edge nodes)."""


class InconsistentDistances(ValueError):
    """Raised when a distance pair fits no point in the plane."""


@dataclass(frozen=True, slots=True)
class Position:
    """A point in the plane, meters."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"position coordinates must be finite, got ({self.x}, {self.y})")


def euclidean_distance(a: Position, b: Position) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


@dataclass(frozen=True, slots=True)
class LocalFrame:
    """Rigid frame mapping world coordinates to the two-edge local frame.

    The origin is the midpoint of the edge pair, (ux, uy) is the world-space
    unit vector pointing from the origin toward e1, and c is half the edge
    separation.  In local coordinates e1 = (+c, 0) and e2 = (-c, 0).
    """

    origin: Position
    c: float
    ux: float
    uy: float

    def to_local(self, p: Position) -> tuple[float, float]:
        dx = p.x - self.origin.x
        dy = p.y - self.origin.y
        return dx * self.ux + dy * self.uy, -dx * self.uy + dy * self.ux

    def to_world(self, x: float, y: float) -> Position:
        return Position(
            self.origin.x + x * self.ux - y * self.uy,
            self.origin.y + x * self.uy + y * self.ux,
        )


def make_frame(e1: Position, e2: Position) -> LocalFrame:
    """Build the local frame for an edge pair, e1 on the positive x axis.

    Raises DegenerateFrame if the edges coincide (no axis to build).
    """
    half_span = euclidean_distance(e1, e2) / 2.0
    if half_span < 1e-12:
        raise DegenerateFrame(f"edge nodes coincide at ({e1.x}, {e1.y})")
    origin = Position((e1.x + e2.x) / 2.0, (e1.y + e2.y) / 2.0)
    ux = (e1.x - origin.x) / half_span
    uy = (e1.y - origin.y) / half_span
    return LocalFrame(origin=origin, c=half_span, ux=ux, uy=uy)


def localize(d1: float, d2: float, frame: LocalFrame) -> tuple[float, float]:
    """Recover local (x1, y1sq) from the two edge distances.

    Subtracting the two circle equations (x -+ c)^2 + y^2 = d^2 gives the
    abscissa directly; the squared ordinate follows from either circle.  The
    sign of y is not observable and not returned.  A squared ordinate below
    -LOCALIZE_TOLERANCE means the distances fit no point and raises
    InconsistentDistances; tiny negatives are clamped to 0.
    """
    if d1 <= 0.0 or d2 <= 0.0 or not (math.isfinite(d1) and math.isfinite(d2)):
        raise InconsistentDistances(f"distances must be positive finite, got ({d1}, {d2})")
    c = frame.c
    x1 = (d2 * d2 - d1 * d1) / (4.0 * c)
    y1sq = d1 * d1 - (x1 - c) ** 2
    if y1sq < 0.0:
        if y1sq < -LOCALIZE_TOLERANCE:
            raise InconsistentDistances(
                f"distance pair ({d1}, {d2}) at half-span {c} leaves no real position "
                f"(squared ordinate {y1sq})"
            )
        y1sq = 0.0
    return x1, y1sq


@dataclass(frozen=True, slots=True)
class IntervalInputs:
    """Inputs to a feasibility-interval computation, all in the local frame."""

    x1: float
    y1sq: float
    r: float
    alpha: float

    def __post_init__(self) -> None:
        problems = []
        if not math.isfinite(self.x1):
            problems.append(f"x1 must be finite, got {self.x1}")
        if not (math.isfinite(self.y1sq) and self.y1sq >= 0.0):
            problems.append(f"y1sq must be >= 0, got {self.y1sq}")
        if not (math.isfinite(self.r) and self.r >= 0.0):
            problems.append(f"r must be >= 0, got {self.r}")
        if not (math.isfinite(self.alpha) and self.alpha > 0.0):
            problems.append(f"alpha must be > 0, got {self.alpha}")
        if problems:
            raise ValueError("; ".join(problems))


@dataclass(frozen=True, slots=True)
class RatioInterval:
    """Closed feasibility interval for the RSSI ratio eta = (d1/d2)^alpha.

    lo == 0.0 is the unbounded-below marker (the reachability disk covers
    e1, so eta can get arbitrarily close to 0); hi == inf is the
    unbounded-above marker (disk covers e2).  Any positive eta passes the
    membership test on an unbounded side.
    """

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not (self.lo >= 0.0 and self.hi > 0.0 and self.lo <= self.hi):
            raise ValueError(f"invalid interval [{self.lo}, {self.hi}]")
        if math.isinf(self.lo) or math.isnan(self.lo) or math.isnan(self.hi):
            raise ValueError(f"invalid interval [{self.lo}, {self.hi}]")

    @property
    def bounded_below(self) -> bool:
        return self.lo > 0.0

    @property
    def bounded_above(self) -> bool:
        return math.isfinite(self.hi)

    def contains(self, eta: float, rel_tol: float = CONTAINS_REL_TOL) -> bool:
        if not (math.isfinite(eta) and eta > 0.0):
            return False
        if self.bounded_below and eta < self.lo * (1.0 - rel_tol):
            return False
        if self.bounded_above and eta > self.hi * (1.0 + rel_tol):
            return False
        return True


def _ratio_from_t(t: float) -> float:
    """Map a tangency root back to a squared distance ratio."""
    denom = t - 1.0
    if denom == 0.0:
        return math.inf
    return (t + 1.0) / denom


def distance_ratio_sq_extrema(
    x1: float, y1sq: float, r: float, c: float
) -> tuple[float, float]:
    """Extreme squared distance ratios d2^2/d1^2 over the reachability disk.

    The disk has radius r and is centered at local (x1, +-sqrt(y1sq)); the
    two centers give mirror-image disks with identical ratio ranges, so only
    the inputs' squared ordinate is needed.  Returns (kmin, kmax) where
    kmin == 0.0 marks "unbounded toward 0" (disk covers e2 at (-c, 0)) and
    kmax == inf marks "unbounded above" (disk covers e1 at (+c, 0)).

    For r > 0 with both edges outside the disk the extrema are the two roots
    of the tangency quadratic

        A t^2 + B t + C = 0,
        A = 4 c^2 (x1^2 - r^2),  B = -4 x1 c D,  C = D^2 + 4 r^2 c^2,
        D = x1^2 + y1sq + c^2 - r^2,

    mapped through k = (t+1)/(t-1) and sorted.  When |x1| == r the disk is
    tangent to the equal-distance line x = 0 and the quadratic degenerates:
    one extremum is exactly 1 and the other comes from the linear root.
    """
    if not (math.isfinite(c) and c > 0.0):
        raise ValueError(f"half-span c must be positive finite, got {c}")
    if not (math.isfinite(x1) and math.isfinite(y1sq) and y1sq >= 0.0):
        raise ValueError(f"invalid disk center (x1={x1}, y1sq={y1sq})")
    if not (math.isfinite(r) and r >= 0.0):
        raise ValueError(f"motion budget r must be >= 0, got {r}")

    d1sq = (x1 - c) ** 2 + y1sq
    d2sq = (x1 + c) ** 2 + y1sq
    rsq = r * r
    e1_inside = d1sq <= rsq
    e2_inside = d2sq <= rsq

    if e1_inside and e2_inside:
        return 0.0, math.inf

    if r == 0.0:
        if d1sq == 0.0 or d2sq == 0.0:
            raise ValueError("node coincides with an edge node; ratio undefined")
        k0 = d2sq / d1sq
        return k0, k0

    big_d = x1 * x1 + y1sq + c * c - rsq
    coeff_a = 4.0 * c * c * (x1 * x1 - rsq)
    coeff_b = -4.0 * x1 * c * big_d
    coeff_c = big_d * big_d + 4.0 * rsq * c * c

    scale_a = 4.0 * c * c * (x1 * x1 + rsq)
    if abs(coeff_a) <= 1e-14 * scale_a:
        # Disk tangent to the bisector x = 0 from one side: ratio 1 is
        # attained at the touch point, the other extremum is the linear root.
        candidates = [1.0, _ratio_from_t(-coeff_c / coeff_b)]
    else:
        disc = coeff_b * coeff_b - 4.0 * coeff_a * coeff_c
        if disc < 0.0:
            disc = 0.0  # double tangency up to rounding
        sq = math.sqrt(disc)
        q = -0.5 * (coeff_b + sq) if coeff_b >= 0.0 else -0.5 * (coeff_b - sq)
        # q == 0 would need B == 0 and disc == 0, impossible here since then
        # 4*A*C = 0 while C = D^2 + 4 r^2 c^2 > 0 for r > 0.
        candidates = [_ratio_from_t(q / coeff_a), _ratio_from_t(coeff_c / q)]

    valid = [k for k in candidates if k > 0.0]
    if not valid:
        # Unreachable for inputs satisfying the preconditions; kept so a
        # rounding catastrophe degrades to the point ratio instead of nonsense.
        valid = [d2sq / d1sq] if d1sq > 0.0 else [math.inf]

    kmin = min(valid)
    kmax = max(valid)
    if e1_inside:
        kmax = math.inf
    if e2_inside:
        kmin = 0.0
    return kmin, kmax


def rssi_ratio_interval(inputs: IntervalInputs, c: float) -> RatioInterval:
    """Feasible band for the RSSI ratio eta after one bounded move.

    eta = (d1/d2)^alpha = k^(-alpha/2), decreasing in the squared distance
    ratio k, so the band is [kmax^(-alpha/2), kmin^(-alpha/2)].  Unbounded
    ratio extrema map to the matching unbounded eta bounds (kmax = inf to
    lo = 0.0, kmin = 0.0 to hi = inf).
    """
    kmin, kmax = distance_ratio_sq_extrema(inputs.x1, inputs.y1sq, inputs.r, c)
    half = inputs.alpha / 2.0
    lo = 0.0 if math.isinf(kmax) else kmax ** (-half)
    hi = math.inf if kmin == 0.0 else kmin ** (-half)
    if hi < lo:  # can only be ulp noise from the two pow calls
        lo, hi = hi, lo
    return RatioInterval(lo, hi)


def _boundary_ratio(theta: float, x1: float, y1: float, r: float, c: float) -> float:
    px = x1 + r * math.cos(theta)
    py = y1 + r * math.sin(theta)
    return ((px + c) ** 2 + py * py) / ((px - c) ** 2 + py * py)


def ratio_interval_oracle(
    inputs: IntervalInputs, c: float, samples: int = 100_000
) -> RatioInterval:
    """Brute-force check of rssi_ratio_interval by disk sampling.

    The squared ratio has no interior critical points except at the edge
    positions themselves, so unless an edge lies inside the disk its extrema
    over the closed disk sit on the boundary circle.  The oracle scans a
    dense boundary grid, then sharpens each extreme angle with a bounded
    derivative-free minimization over the bracketing grid cell.  It shares
    no code with the closed form.
    """
    if samples < 10_000:
        raise ValueError(f"oracle needs at least 10000 samples, got {samples}")
    if not (math.isfinite(c) and c > 0.0):
        raise ValueError(f"half-span c must be positive finite, got {c}")
    x1, y1sq, r, alpha = inputs.x1, inputs.y1sq, inputs.r, inputs.alpha
    y1 = math.sqrt(y1sq)
    half = alpha / 2.0

    d1sq = (x1 - c) ** 2 + y1sq
    d2sq = (x1 + c) ** 2 + y1sq
    if r == 0.0:
        if d1sq == 0.0 or d2sq == 0.0:
            raise ValueError("node coincides with an edge node; ratio undefined")
        eta = (d1sq / d2sq) ** half
        return RatioInterval(eta, eta)

    e1_inside = d1sq <= r * r
    e2_inside = d2sq <= r * r
    if e1_inside and e2_inside:
        return RatioInterval(0.0, math.inf)

    theta = np.linspace(0.0, 2.0 * math.pi, samples, endpoint=False)
    px = x1 + r * np.cos(theta)
    py = y1 + r * np.sin(theta)
    k = ((px + c) ** 2 + py**2) / ((px - c) ** 2 + py**2)
    step = 2.0 * math.pi / samples

    def refine(theta0: float, sign: float) -> float:
        res = minimize_scalar(
            lambda th: sign * _boundary_ratio(th, x1, y1, r, c),
            bounds=(theta0 - step, theta0 + step),
            method="bounded",
            options={"xatol": 1e-13},
        )
        return sign * res.fun

    if e1_inside:
        lo = 0.0
    else:
        kmax = max(float(k.max()), refine(float(theta[int(k.argmax())]), -1.0))
        lo = kmax ** (-half)
    if e2_inside:
        hi = math.inf
    else:
        kmin = min(float(k.min()), refine(float(theta[int(k.argmin())]), 1.0))
        hi = kmin ** (-half)
    return RatioInterval(lo, hi)
