"""Planar geometry: local projection plus distance/containment primitives.

Everything downstream works in a local equirectangular meter frame so that
hazard growth rates (meters per time instance) and travel times compare
directly. Fire regions are closed sets: a point on the boundary counts as
burnt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

EARTH_RADIUS_M = 6_371_000.0

# Coordinates closer than this (meters) are treated as coincident.
EPS = 1e-9


class Point(NamedTuple):
    x: float
    y: float


class Circle(NamedTuple):
    center: Point
    radius: float


# A polyline is an open chain; a ring is a simple polygon boundary stored
# without the repeated closing vertex.
Polyline = tuple[Point, ...]
Ring = tuple[Point, ...]


@dataclass(frozen=True)
class FireSet:
    """Union of circles and simple polygons (either list may be empty)."""

    circles: tuple[Circle, ...] = ()
    polygons: tuple[Ring, ...] = ()

    @property
    def is_empty(self) -> bool:
        return not self.circles and not self.polygons


def polyline(points: Sequence[Sequence[float]]) -> Polyline:
    """Build a polyline, rejecting chains shorter than one segment or with
    coincident consecutive vertices."""
    pts = tuple(Point(float(p[0]), float(p[1])) for p in points)
    if len(pts) < 2:
        raise ValueError("polyline needs at least two vertices")
    for a, b in zip(pts, pts[1:]):
        if math.hypot(b.x - a.x, b.y - a.y) <= EPS:
            raise ValueError("polyline has coincident consecutive vertices")
    return pts


def project(lat: float, lon: float, origin: tuple[float, float]) -> Point:
    """Equirectangular projection of (lat, lon) degrees about an origin.

    x grows east, y grows north, both in meters. Accurate to well under 1%
    for points within ~10 km of the origin at moderate latitudes.
    """
    if not (-90.0 <= lat <= 90.0) or not (-180.0 <= lon <= 180.0):
        raise ValueError(f"coordinates out of range: ({lat}, {lon})")
    lat0, lon0 = origin
    rad = math.pi / 180.0
    x = EARTH_RADIUS_M * (lon - lon0) * math.cos(lat0 * rad) * rad
    y = EARTH_RADIUS_M * (lat - lat0) * rad
    return Point(x, y)


def unproject(p: Point, origin: tuple[float, float]) -> tuple[float, float]:
    """Inverse of project: meters back to (lat, lon) degrees."""
    lat0, lon0 = origin
    rad = math.pi / 180.0
    lat = lat0 + p.y / (EARTH_RADIUS_M * rad)
    lon = lon0 + p.x / (EARTH_RADIUS_M * math.cos(lat0 * rad) * rad)
    return lat, lon


def polyline_length(line: Polyline) -> float:
    return sum(math.hypot(b.x - a.x, b.y - a.y) for a, b in zip(line, line[1:]))


def dist_point_segment(p: Point, a: Point, b: Point) -> float:
    """Euclidean distance from p to the closed segment [a, b].

    A degenerate segment (a == b) falls back to point distance.
    """
    abx, aby = b.x - a.x, b.y - a.y
    apx, apy = p.x - a.x, p.y - a.y
    denom = abx * abx + aby * aby
    if denom <= EPS * EPS:
        return math.hypot(apx, apy)
    t = (apx * abx + apy * aby) / denom
    if t <= 0.0:
        return math.hypot(apx, apy)
    if t >= 1.0:
        return math.hypot(p.x - b.x, p.y - b.y)
    return math.hypot(apx - t * abx, apy - t * aby)


def _orient(a: Point, b: Point, c: Point) -> float:
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)


def _on_segment(p: Point, a: Point, b: Point) -> bool:
    """p collinear-and-between a and b, with a small absolute tolerance."""
    if abs(_orient(a, b, p)) > EPS * (abs(b.x - a.x) + abs(b.y - a.y) + 1.0):
        return False
    return (
        min(a.x, b.x) - EPS <= p.x <= max(a.x, b.x) + EPS
        and min(a.y, b.y) - EPS <= p.y <= max(a.y, b.y) + EPS
    )


def segments_intersect(a1: Point, a2: Point, b1: Point, b2: Point) -> bool:
    d1 = _orient(b1, b2, a1)
    d2 = _orient(b1, b2, a2)
    d3 = _orient(a1, a2, b1)
    d4 = _orient(a1, a2, b2)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and (
        (d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)
    ):
        return True
    return (
        _on_segment(a1, b1, b2)
        or _on_segment(a2, b1, b2)
        or _on_segment(b1, a1, a2)
        or _on_segment(b2, a1, a2)
    )


def dist_segment_segment(a1: Point, a2: Point, b1: Point, b2: Point) -> float:
    if segments_intersect(a1, a2, b1, b2):
        return 0.0
    return min(
        dist_point_segment(a1, b1, b2),
        dist_point_segment(a2, b1, b2),
        dist_point_segment(b1, a1, a2),
        dist_point_segment(b2, a1, a2),
    )


def _ring_edges(ring: Ring):
    n = len(ring)
    for i in range(n):
        yield ring[i], ring[(i + 1) % n]


def point_in_ring(p: Point, ring: Ring) -> bool:
    """Ray-casting containment test; the boundary counts as inside."""
    for a, b in _ring_edges(ring):
        if _on_segment(p, a, b):
            return True
    inside = False
    for a, b in _ring_edges(ring):
        if (a.y > p.y) != (b.y > p.y):
            x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y)
            if p.x < x_cross:
                inside = not inside
    return inside


def contains(fire: FireSet, p: Point) -> bool:
    """True iff p lies in the closed fire set. Empty set contains nothing."""
    for c in fire.circles:
        if math.hypot(p.x - c.center.x, p.y - c.center.y) <= c.radius:
            return True
    for ring in fire.polygons:
        if point_in_ring(p, ring):
            return True
    return False


def dist_polyline_fireset(line: Polyline, fire: FireSet) -> float:
    """Distance in meters from a road polyline to the nearest fire component.

    Zero iff the polyline touches or enters the fire set. Raises on an empty
    fire set; callers treat "no fire" as infinite distance.
    """
    if fire.is_empty:
        raise ValueError("empty fire set: no fire to measure against")
    best = math.inf
    for a, b in zip(line, line[1:]):
        for c in fire.circles:
            d = dist_point_segment(c.center, a, b) - c.radius
            if d < best:
                best = d
            if best <= 0.0:
                return 0.0
        for ring in fire.polygons:
            if point_in_ring(a, ring):
                return 0.0
            for e1, e2 in _ring_edges(ring):
                d = dist_segment_segment(a, b, e1, e2)
                if d < best:
                    best = d
                if best <= 0.0:
                    return 0.0
    return max(best, 0.0)


def validate_ring(ring: Sequence[Sequence[float]]) -> Ring:
    """Check a polygon ring is simple (closed, non-self-intersecting)."""
    pts = [Point(float(p[0]), float(p[1])) for p in ring]
    if len(pts) >= 2 and math.hypot(pts[0].x - pts[-1].x, pts[0].y - pts[-1].y) <= EPS:
        pts = pts[:-1]  # drop an explicit closing vertex
    if len(pts) < 3:
        raise ValueError("polygon ring needs at least three distinct vertices")
    n = len(pts)
    edges = [(pts[i], pts[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue  # adjacent edges share a vertex by construction
            if segments_intersect(*edges[i], *edges[j]):
                raise ValueError(f"polygon ring self-intersects (edges {i} and {j})")
    return tuple(pts)


def haversine_m(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Great-circle distance in meters; reference metric for projection tests."""
    phi1, phi2 = math.radians(lat1), math.radians(lat2)
    dphi = math.radians(lat2 - lat1)
    dlmb = math.radians(lon2 - lon1)
    a = math.sin(dphi / 2) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlmb / 2) ** 2
    return 2 * EARTH_RADIUS_M * math.atan2(math.sqrt(a), math.sqrt(1 - a))
