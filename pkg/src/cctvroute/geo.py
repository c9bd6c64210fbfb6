"""Planar geometry over a local equirectangular projection.

All meter-valued math assumes a spherical earth (radius 6,371,000 m) and a
city-scale extract. Within 0.5 degrees of the projection origin the planar
approximation stays far below the tolerances used anywhere else in the
package, so downstream modules treat LocalXY coordinates as exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

EARTH_RADIUS_M = 6_371_000.0

# Documented fidelity envelope: callers should stay within 0.5 degrees of
# the origin for sub-meter accuracy. The hard guard sits at 3x that so a
# whole-degree offset is still computable, just less precise.
MAX_PROJECTION_SPAN_DEG = 0.5
PROJECTION_GUARD_DEG = 1.5

# Projected coordinates beyond this are outside the validity envelope.
# City-scale data stays far below; the bound matches the 1.5 degree
# projection guard (about 167 km at the equator).
MAX_LOCAL_COORD_M = 200_000.0

# Normalized discriminant below which a circle merely grazes the segment
# line; tangency is treated as no intersection.
TANGENT_EPS = 1e-12


class ProjectionRangeError(ValueError):
    """Raised when a point lies too far from the projection origin."""


@dataclass(frozen=True, slots=True)
class GeoPoint:
    """WGS84 position in decimal degrees."""

    lat: float
    lon: float

    def __post_init__(self):
        if not (math.isfinite(self.lat) and -90.0 <= self.lat <= 90.0):
            raise ValueError(f"latitude out of range: {self.lat!r}")
        if not (math.isfinite(self.lon) and -180.0 <= self.lon <= 180.0):
            raise ValueError(f"longitude out of range: {self.lon!r}")


@dataclass(frozen=True, slots=True)
class LocalXY:
    """Planar position in meters east (x) and north (y) of the origin."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError("non-finite local coordinate")
        if abs(self.x) >= MAX_LOCAL_COORD_M or abs(self.y) >= MAX_LOCAL_COORD_M:
            raise ValueError(
                f"local coordinate outside projection validity: ({self.x}, {self.y})"
            )


@dataclass(frozen=True, slots=True)
class Segment:
    """Straight piece of a way polyline. Endpoints must differ."""

    a: LocalXY
    b: LocalXY

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError(f"zero-length segment at {self.a}")

    @property
    def length_m(self) -> float:
        return math.hypot(self.b.x - self.a.x, self.b.y - self.a.y)

    def point_at(self, t: float) -> LocalXY:
        """Point at parameter t, where t=0 is a and t=1 is b."""
        return LocalXY(
            self.a.x + t * (self.b.x - self.a.x),
            self.a.y + t * (self.b.y - self.a.y),
        )


def project(p: GeoPoint, origin: GeoPoint) -> LocalXY:
    """Project p into meters east/north of origin (equirectangular).

    x = R * dlon_rad * cos(origin.lat), y = R * dlat_rad. Sub-meter fidelity
    holds within 0.5 degrees of the origin; beyond the hard guard of 1.5
    degrees a ProjectionRangeError is raised.
    """
    dlat = p.lat - origin.lat
    dlon = p.lon - origin.lon
    if abs(dlat) > PROJECTION_GUARD_DEG or abs(dlon) > PROJECTION_GUARD_DEG:
        raise ProjectionRangeError(
            f"point ({p.lat}, {p.lon}) farther than {PROJECTION_GUARD_DEG} deg "
            f"from origin ({origin.lat}, {origin.lon})"
        )
    x = EARTH_RADIUS_M * math.radians(dlon) * math.cos(math.radians(origin.lat))
    y = EARTH_RADIUS_M * math.radians(dlat)
    return LocalXY(x, y)


def unproject(xy: LocalXY, origin: GeoPoint) -> GeoPoint:
    """Inverse of project for the same origin."""
    lat = origin.lat + math.degrees(xy.y / EARTH_RADIUS_M)
    lon = origin.lon + math.degrees(
        xy.x / (EARTH_RADIUS_M * math.cos(math.radians(origin.lat)))
    )
    return GeoPoint(lat, lon)


def haversine_m(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance between two WGS84 points, meters."""
    lat1 = math.radians(a.lat)
    lat2 = math.radians(b.lat)
    dlat = lat2 - lat1
    dlon = math.radians(b.lon - a.lon)
    s = math.sin(dlat / 2.0) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_M * math.asin(math.sqrt(s))


def local_distance_m(a: LocalXY, b: LocalXY) -> float:
    return math.hypot(b.x - a.x, b.y - a.y)


def point_segment_distance(p: LocalXY, seg: Segment) -> float:
    """Distance from p to the closest point of seg (endpoints included)."""
    ax, ay = seg.a.x, seg.a.y
    dx = seg.b.x - ax
    dy = seg.b.y - ay
    t = ((p.x - ax) * dx + (p.y - ay) * dy) / (dx * dx + dy * dy)
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    return math.hypot(p.x - (ax + t * dx), p.y - (ay + t * dy))


def _refine_root(t: float, fx: float, fy: float, dx: float, dy: float, r: float) -> float:
    # One Newton step on g(t) = |f + t*d|^2 - r^2 tightens the root so the
    # returned point sits within 1e-9 m of the circle.
    for _ in range(2):
        px = fx + t * dx
        py = fy + t * dy
        g = px * px + py * py - r * r
        dg = 2.0 * (px * dx + py * dy)
        if dg == 0.0:
            break
        t -= g / dg
    return t


def circle_segment_intersection_params(center: LocalXY, radius_m: float, seg: Segment) -> list[float]:
    """Parameters t in [0, 1] where seg crosses the circle boundary, ascending.

    Tangency (normalized discriminant <= 1e-12) yields no intersections.
    """
    if radius_m <= 0.0:
        raise ValueError(f"radius must be positive, got {radius_m}")
    fx = seg.a.x - center.x
    fy = seg.a.y - center.y
    dx = seg.b.x - seg.a.x
    dy = seg.b.y - seg.a.y
    # Normalize to t^2 + b*t + c = 0 so the discriminant cutoff is scale-free.
    a = dx * dx + dy * dy
    b = 2.0 * (fx * dx + fy * dy) / a
    c = (fx * fx + fy * fy - radius_m * radius_m) / a
    disc = b * b - 4.0 * c
    if disc <= TANGENT_EPS:
        return []
    sq = math.sqrt(disc)
    # Stable quadratic: compute the larger-magnitude root first.
    q = -0.5 * (b + math.copysign(sq, b))
    roots = (q, c / q) if q != 0.0 else (0.0, -b)
    out = []
    for t in roots:
        t = _refine_root(t, fx, fy, dx, dy, radius_m)
        if 0.0 <= t <= 1.0:
            out.append(t)
    out.sort()
    return out


def circle_segment_intersections(center: LocalXY, radius_m: float, seg: Segment) -> list[LocalXY]:
    """Intersection points of a circle boundary with seg, ordered along seg."""
    return [seg.point_at(t) for t in circle_segment_intersection_params(center, radius_m, seg)]


def bearing_deg(a: LocalXY, b: LocalXY) -> float:
    """Compass bearing from a to b: 0 = north, 90 = east, in [0, 360)."""
    if a == b:
        raise ValueError("bearing undefined for coincident points")
    return math.degrees(math.atan2(b.x - a.x, b.y - a.y)) % 360.0
