"""Qualitative and metric spatial calculus over axis-aligned boxes, points and segments.

All coordinates follow the image convention: origin top-left, x grows
rightward, y grows downward.  Boxes are axis-aligned with strictly
positive width and height, so every topological question reduces to
per-axis interval comparisons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence, Tuple

from .errors import CoincidentCentroids, InvalidRegion, ZeroLengthSegment

Point = Tuple[float, float]


class SpatialRelationClass(Enum):
    DISJOINT = "disjoint"
    TOUCH = "touch"
    CONTAINS = "contains"
    INTERSECT = "intersect"
    WITHIN = "within"
    COVERED_BY = "covered_by"
    CROSSES = "crosses"
    OVERLAP = "overlap"
    INSIDE = "inside"


class DirectionClass(Enum):
    ABOVE = "above"
    BELOW = "below"
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned pixel box given by top-left corner and size."""

    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        for v in (self.x, self.y, self.w, self.h):
            if not math.isfinite(v):
                raise ValueError("bounding box coordinates must be finite")
        if self.w <= 0 or self.h <= 0:
            raise ValueError("bounding box must have positive width and height")

    @property
    def x2(self) -> float:
        return self.x + self.w

    @property
    def y2(self) -> float:
        return self.y + self.h

    @property
    def centroid(self) -> Point:
        return (self.x + self.w / 2.0, self.y + self.h / 2.0)

    @property
    def area(self) -> float:
        return self.w * self.h


@dataclass(frozen=True)
class Region:
    """Simple polygon (>= 3 vertices, positive area, no self-intersection)."""

    polygon: Tuple[Point, ...]

    def __post_init__(self):
        pts = tuple((float(x), float(y)) for x, y in self.polygon)
        object.__setattr__(self, "polygon", pts)
        if len(pts) < 3:
            raise InvalidRegion("region needs at least 3 vertices")
        if abs(_shoelace(pts)) <= 0.0:
            raise InvalidRegion("region has zero area")
        if _self_intersects(pts):
            raise InvalidRegion("region polygon is self-intersecting")


def _shoelace(pts: Sequence[Point]) -> float:
    s = 0.0
    n = len(pts)
    for i in range(n):
        x1, y1 = pts[i]
        x2, y2 = pts[(i + 1) % n]
        s += x1 * y2 - x2 * y1
    return s / 2.0


def _segments_cross(p1, p2, q1, q2) -> bool:
    # Proper crossing only; shared endpoints of adjacent edges do not count.
    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        return (v > 0) - (v < 0)

    o1, o2 = orient(p1, p2, q1), orient(p1, p2, q2)
    o3, o4 = orient(q1, q2, p1), orient(q1, q2, p2)
    return o1 != o2 and o3 != o4 and 0 not in (o1, o2, o3, o4)


def _self_intersects(pts: Sequence[Point]) -> bool:
    n = len(pts)
    edges = [(pts[i], pts[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue  # adjacent edges share a vertex
            if _segments_cross(*edges[i], *edges[j]):
                return True
    return False


# --- interval helpers (closed interval [lo, hi] per axis) ---

def _closed_overlap(a1, a2, b1, b2) -> bool:
    return max(a1, b1) <= min(a2, b2)


def _open_overlap(a1, a2, b1, b2) -> bool:
    return max(a1, b1) < min(a2, b2)


def _closed_subset(a1, a2, b1, b2) -> bool:
    """[a1,a2] subset of [b1,b2]."""
    return b1 <= a1 and a2 <= b2


def _open_subset(a1, a2, b1, b2) -> bool:
    """[a1,a2] subset of the open interval (b1,b2)."""
    return b1 < a1 and a2 < b2


def topology(a: BoundingBox, b: BoundingBox) -> frozenset:
    """All topological classes that hold between two boxes.

    Classes are not mutually exclusive; e.g. containment implies
    intersection.  CROSSES applies to line-vs-box geometry only and is
    never returned for a box pair.
    """
    ax = (a.x, a.x2)
    ay = (a.y, a.y2)
    bx = (b.x, b.x2)
    by = (b.y, b.y2)

    closed = _closed_overlap(*ax, *bx) and _closed_overlap(*ay, *by)
    if not closed:
        return frozenset({SpatialRelationClass.DISJOINT})

    out = {SpatialRelationClass.INTERSECT}
    interiors = _open_overlap(*ax, *bx) and _open_overlap(*ay, *by)
    if not interiors:
        out.add(SpatialRelationClass.TOUCH)
        return frozenset(out)

    a_in_b = _closed_subset(*ax, *bx) and _closed_subset(*ay, *by)
    b_in_a = _closed_subset(*bx, *ax) and _closed_subset(*by, *ay)
    if b_in_a:
        out.add(SpatialRelationClass.CONTAINS)
    if a_in_b:
        out.add(SpatialRelationClass.WITHIN)
        if _open_subset(*ax, *bx) and _open_subset(*ay, *by):
            out.add(SpatialRelationClass.INSIDE)
        else:
            out.add(SpatialRelationClass.COVERED_BY)
    if not a_in_b and not b_in_a:
        out.add(SpatialRelationClass.OVERLAP)
    return frozenset(out)


def overlap_ratio(a: BoundingBox, b: BoundingBox) -> float:
    """Fraction of a's area covered by b (asymmetric, in [0, 1])."""
    iw = min(a.x2, b.x2) - max(a.x, b.x)
    ih = min(a.y2, b.y2) - max(a.y, b.y)
    if iw <= 0 or ih <= 0:
        return 0.0
    return (iw * ih) / a.area


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union; convenience composition, used by no rule."""
    iw = min(a.x2, b.x2) - max(a.x, b.x)
    ih = min(a.y2, b.y2) - max(a.y, b.y)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    return inter / (a.area + b.area - inter)


def direction(a: BoundingBox, b: BoundingBox) -> DirectionClass:
    """Qualitative direction of a relative to b, on centroids.

    Axis dominance breaks ties: |dy| >= |dx| resolves to the vertical
    class.  direction(a, b) == ABOVE reads "a is above b".
    """
    ax, ay = a.centroid
    bx, by = b.centroid
    dx = bx - ax
    dy = by - ay
    if dx == 0 and dy == 0:
        raise CoincidentCentroids("boxes have coincident centroids")
    if abs(dy) >= abs(dx):
        return DirectionClass.ABOVE if ay < by else DirectionClass.BELOW
    return DirectionClass.LEFT if ax < bx else DirectionClass.RIGHT


def centroid_distance(a: BoundingBox, b: BoundingBox) -> float:
    return point_distance(a.centroid, b.centroid)


def point_distance(p: Point, q: Point) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


def segment_angle(u: Tuple[Point, Point], v: Tuple[Point, Point]) -> float:
    """Unsigned angle in degrees [0, 180] between two directed segments."""
    ux = u[1][0] - u[0][0]
    uy = u[1][1] - u[0][1]
    vx = v[1][0] - v[0][0]
    vy = v[1][1] - v[0][1]
    nu = math.hypot(ux, uy)
    nv = math.hypot(vx, vy)
    if nu == 0 or nv == 0:
        raise ZeroLengthSegment("segments must have nonzero length")
    c = (ux * vx + uy * vy) / (nu * nv)
    c = max(-1.0, min(1.0, c))
    return math.degrees(math.acos(c))


def inside_region(b: BoundingBox, reg: Region) -> bool:
    """True iff b's centroid is strictly inside the polygon.

    Boundary points count as outside (ray casting with explicit
    on-edge rejection).
    """
    px, py = b.centroid
    pts = reg.polygon
    n = len(pts)
    eps = 1e-9
    # on-edge check
    for i in range(n):
        x1, y1 = pts[i]
        x2, y2 = pts[(i + 1) % n]
        cross = (x2 - x1) * (py - y1) - (y2 - y1) * (px - x1)
        if abs(cross) <= eps * max(1.0, abs(x2 - x1) + abs(y2 - y1)):
            if min(x1, x2) - eps <= px <= max(x1, x2) + eps and \
               min(y1, y2) - eps <= py <= max(y1, y2) + eps:
                return False
    inside = False
    for i in range(n):
        x1, y1 = pts[i]
        x2, y2 = pts[(i + 1) % n]
        if (y1 > py) != (y2 > py):
            xin = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
            if px < xin:
                inside = not inside
    return inside
