"""Exact planar primitives shared by the analytic solvers.

Public angles are in degrees; conversion to radians happens here and nowhere
else.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional

from .errors import DegenerateDirection, InfiniteIntersections

#: relative tolerance used for tangency decisions (scaled by length**2)
TANGENCY_RTOL = 1e-9


@dataclass(frozen=True, slots=True)
class Vec2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite coordinates ({self.x}, {self.y})")

    @classmethod
    def of(cls, xy) -> "Vec2":
        x, y = xy
        return cls(float(x), float(y))

    def __add__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x - other.x, self.y - other.y)

    def __mul__(self, k: float) -> "Vec2":
        return Vec2(self.x * k, self.y * k)

    __rmul__ = __mul__

    def __truediv__(self, k: float) -> "Vec2":
        return Vec2(self.x / k, self.y / k)

    def __neg__(self) -> "Vec2":
        return Vec2(-self.x, -self.y)

    def __iter__(self) -> Iterator[float]:
        yield self.x
        yield self.y

    def dot(self, other: "Vec2") -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other: "Vec2") -> float:
        return self.x * other.y - self.y * other.x

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def perp(self) -> "Vec2":
        """Counter-clockwise quarter turn."""
        return Vec2(-self.y, self.x)

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


def distance(p: Vec2, q: Vec2) -> float:
    return math.hypot(p.x - q.x, p.y - q.y)


def unit_direction(frm: Vec2, to_subtract: Vec2) -> Vec2:
    """Return ``(frm - to_subtract) / |frm - to_subtract|``."""
    d = frm - to_subtract
    n = d.norm()
    if n == 0.0:
        raise DegenerateDirection(f"coincident points {frm}")
    return d / n


def circle_circle_intersections(c1: Vec2, r1: float, c2: Vec2, r2: float) -> list[Vec2]:
    """Intersection points of two circles (0, 1 or 2 points).

    Tangent circles give a single point. Disjoint or nested circles give an
    empty list.
    """
    if r1 <= 0 or r2 <= 0:
        raise ValueError("radii must be positive")
    delta = c2 - c1
    d = delta.norm()
    if d == 0.0:
        if r1 == r2:
            raise InfiniteIntersections("identical circles")
        return []
    # distance from c1 to the radical line, then half-chord length squared
    a = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d)
    h2 = r1 * r1 - a * a
    scale = max(r1, r2, d)
    e = delta / d
    base = c1 + e * a
    if abs(h2) <= TANGENCY_RTOL * scale * scale:
        return [base]
    if h2 < 0:
        return []
    h = math.sqrt(h2)
    off = e.perp() * h
    return [base + off, base - off]


def segment_circle_first_hit(p0: Vec2, p1: Vec2, center: Vec2, radius: float) -> Optional[float]:
    """Smallest ``mu`` in [0, 1] with ``|(1-mu) p0 + mu p1 - center| = radius``.

    Returns ``None`` when the segment never reaches the circle.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    seg = p1 - p0
    length = seg.norm()
    if length == 0.0:
        raise DegenerateDirection("segment endpoints coincide")
    u = seg / length
    w = p0 - center
    # lam**2 + 2 beta lam + gamma = 0 with lam the distance along the segment
    beta = w.dot(u)
    gamma = w.dot(w) - radius * radius
    disc = beta * beta - gamma
    scale = max(radius, w.norm(), 1.0)
    tol = TANGENCY_RTOL * scale * scale
    if disc < -tol:
        return None
    if disc <= tol:
        roots = [-beta]
    else:
        sq = math.sqrt(disc)
        if beta > 0:
            r_a = -beta - sq
        else:
            r_a = -beta + sq
        r_b = gamma / r_a if r_a != 0.0 else -2.0 * beta
        roots = sorted((r_a, r_b))
    eps = 1e-12 * max(length, 1.0)
    for lam in roots:
        if -eps <= lam <= length + eps:
            return min(max(lam / length, 0.0), 1.0)
    return None


def angle_between_deg(u: Vec2, v: Vec2) -> float:
    """Unsigned angle between two vectors, in degrees within [0, 180]."""
    if u.norm() == 0.0 or v.norm() == 0.0:
        raise DegenerateDirection("zero vector has no direction")
    # atan2 keeps full precision near 0 and 180 degrees where arccos does not
    return math.degrees(math.atan2(abs(u.cross(v)), u.dot(v)))


def signed_angle_deg(u: Vec2, v: Vec2) -> float:
    """Counter-clockwise angle from ``u`` to ``v`` in (-180, 180]."""
    if u.norm() == 0.0 or v.norm() == 0.0:
        raise DegenerateDirection("zero vector has no direction")
    return math.degrees(math.atan2(u.cross(v), u.dot(v)))


def rotate_about(p: Vec2, center: Vec2, angle_deg: float, orientation: int = 1) -> Vec2:
    """Rotate ``p`` about ``center``; orientation +1 is counter-clockwise."""
    if orientation not in (1, -1):
        raise ValueError("orientation must be +1 or -1")
    ang = math.radians(orientation * angle_deg)
    c, s = math.cos(ang), math.sin(ang)
    d = p - center
    return Vec2(center.x + c * d.x - s * d.y, center.y + s * d.x + c * d.y)
