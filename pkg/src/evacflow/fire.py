"""Hazard scenarios F(t) and the per-instance cache of node overtakes and
road-to-fire distances.

A scenario is either a set of circles growing linearly per instance, or a
sequence of explicit frames (step-held between and after their stamps).
Monotonicity F(t) ⊆ F(t+1) is assumed throughout: once burnt, always burnt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InputError
from .geometry import (
    Circle,
    FireSet,
    Point,
    contains,
    dist_polyline_fireset,
    project,
    unproject,
    validate_ring,
)

DEFAULT_GROWTH_M_PER_INSTANCE = 1.0


@dataclass(frozen=True)
class GrowingCircle:
    center: Point
    r0: float
    growth: float  # meters per instance

    def radius_at(self, t: int) -> float:
        return self.r0 + self.growth * t


@dataclass(frozen=True)
class FireScenario:
    """Either `circles` or `frames` is set, never both."""

    circles: tuple[GrowingCircle, ...] | None = None
    frames: tuple[tuple[int, FireSet], ...] | None = None   # sorted by t

    def __post_init__(self):
        if (self.circles is None) == (self.frames is None):
            raise InputError("scenario must have exactly one of circles/frames")
        if self.frames is not None:
            ts = [t for t, _ in self.frames]
            if not ts or ts != sorted(set(ts)):
                raise InputError("frames must be non-empty with strictly increasing t")

    @property
    def first_instance(self) -> int:
        return 0 if self.circles is not None else self.frames[0][0]


def fire_set_at(scenario: FireScenario, t: int) -> FireSet:
    """F(t). Frame scenarios step-hold: the nearest earlier frame applies,
    indefinitely past the last one."""
    if t < scenario.first_instance:
        raise InputError(f"t={t} outside fire scenario coverage (starts at {scenario.first_instance})")
    if scenario.circles is not None:
        return FireSet(circles=tuple(Circle(c.center, c.radius_at(t)) for c in scenario.circles))
    held = None
    for ft, fset in scenario.frames:
        if ft <= t:
            held = fset
        else:
            break
    return held


def _circle_boundary_samples(c: Circle, k: int = 16):
    for i in range(k):
        a = 2 * math.pi * i / k
        yield Point(c.center.x + c.radius * math.cos(a), c.center.y + c.radius * math.sin(a))


def validate_monotone(scenario: FireScenario, T: int) -> int | None:
    """First t in [first..T-1] where F(t) ⊆ F(t+1) fails, else None.

    Circle scenarios are monotone iff no growth rate is negative. Frame
    scenarios get a sampled check: every boundary vertex of F(t) must lie in
    F(t+1) (circle components are sampled at 16 boundary points).
    """
    if scenario.circles is not None:
        return 0 if any(c.growth < 0 for c in scenario.circles) else None
    for t in range(scenario.first_instance, T):
        cur = fire_set_at(scenario, t)
        nxt = fire_set_at(scenario, t + 1)
        if cur is nxt or cur.is_empty:
            continue
        for ring in cur.polygons:
            if any(not contains(nxt, p) for p in ring):
                return t
        for c in cur.circles:
            if any(not contains(nxt, p) for p in _circle_boundary_samples(c)):
                return t
    return None


@dataclass
class FireCache:
    """Per instance t: the overtaken node ids and each arc's distance to the
    fire (math.inf when there is no fire yet)."""

    T: int
    overtaken: list[frozenset[str]]
    arc_dist: list[dict[tuple[str, str], float]]

    def extend(self, net, scenario: FireScenario) -> None:
        """Grow the cache by one instance (the planner's T+1 step)."""
        t = self.T + 1
        overtaken, dists = _cache_instance(net, scenario, t)
        self.overtaken.append(overtaken)
        self.arc_dist.append(dists)
        self.T = t


def _cache_instance(net, scenario: FireScenario, t: int):
    fset = fire_set_at(scenario, t)
    if fset.is_empty:
        return frozenset(), {a: math.inf for a in net.arcs}
    overtaken = frozenset(nid for nid, node in net.nodes.items() if contains(fset, node.point))
    dists = {key: dist_polyline_fireset(arc.geometry, fset) for key, arc in net.arcs.items()}
    return overtaken, dists


def build_cache(net, scenario: FireScenario, T: int) -> FireCache:
    """Precompute overtaken sets and arc distances for every t in [0..T]."""
    if scenario.first_instance > 0:
        raise InputError("fire scenario must cover t=0 for planning")
    overtaken = []
    dists = []
    for t in range(T + 1):
        o, d = _cache_instance(net, scenario, t)
        overtaken.append(o)
        dists.append(d)
    return FireCache(T, overtaken, dists)


def merge_scenarios(old: FireScenario, new: FireScenario, t_fire: int, T: int) -> FireScenario:
    """Revised hazard: old prediction before t_fire, the union of old and new
    from t_fire on. The union keeps the result monotone even if the revision
    under-covers the old footprint."""
    if old.first_instance > 0:
        raise InputError("old scenario must cover t=0")
    if new.first_instance > t_fire:
        raise InputError(f"new scenario starts at {new.first_instance}, after t_fire={t_fire}")
    if not (0 <= t_fire <= T):
        raise InputError(f"t_fire={t_fire} outside [0..{T}]")
    frames = []
    for t in range(T + 1):
        fset = fire_set_at(old, t)
        if t >= t_fire:
            extra = fire_set_at(new, t)
            fset = FireSet(fset.circles + extra.circles, fset.polygons + extra.polygons)
        frames.append((t, fset))
    return FireScenario(frames=tuple(frames))


# --- scenario file documents -------------------------------------------------

def scenario_from_dict(doc: dict, origin: tuple[float, float]) -> FireScenario:
    """Parse a fire-scenario document, projecting coordinates about the
    network's origin."""
    kind = doc.get("type")
    if kind == "circles":
        circles = []
        for c in doc.get("circles", []):
            r0 = float(c["r0_m"])
            if r0 <= 0:
                raise InputError("circle r0_m must be positive")
            growth = float(c.get("growth_m_per_instance", DEFAULT_GROWTH_M_PER_INSTANCE))
            circles.append(GrowingCircle(project(float(c["lat"]), float(c["lon"]), origin), r0, growth))
        if not circles:
            raise InputError("circle scenario has no circles")
        return FireScenario(circles=tuple(circles))
    if kind == "frames":
        frames = []
        for f in doc.get("frames", []):
            rings = tuple(
                validate_ring([project(float(la), float(lo), origin) for la, lo in ring])
                for ring in f.get("multipolygon", [])
            )
            circles = tuple(
                Circle(project(float(c["lat"]), float(c["lon"]), origin), float(c["radius_m"]))
                for c in f.get("circles", [])
            )
            frames.append((int(f["t"]), FireSet(circles=circles, polygons=rings)))
        if not frames:
            raise InputError("frame scenario has no frames")
        frames.sort(key=lambda p: p[0])
        return FireScenario(frames=tuple(frames))
    raise InputError(f"unknown fire scenario type: {kind!r}")


def scenario_to_dict(scenario: FireScenario, origin: tuple[float, float]) -> dict:
    """Inverse of scenario_from_dict (coordinates rounded to 1e-7 degrees)."""

    def ll(p: Point):
        lat, lon = unproject(p, origin)
        return round(lat, 7), round(lon, 7)

    if scenario.circles is not None:
        out = []
        for c in scenario.circles:
            lat, lon = ll(c.center)
            out.append({"lat": lat, "lon": lon, "r0_m": round(c.r0, 3),
                        "growth_m_per_instance": round(c.growth, 6)})
        return {"type": "circles", "circles": out}
    frames = []
    for t, fset in scenario.frames:
        f: dict = {"t": t}
        if fset.polygons:
            f["multipolygon"] = [[list(ll(p)) for p in ring] for ring in fset.polygons]
        if fset.circles:
            f["circles"] = [
                {"lat": ll(c.center)[0], "lon": ll(c.center)[1], "radius_m": round(c.radius, 3)}
                for c in fset.circles
            ]
        frames.append(f)
    return {"type": "frames", "frames": frames}
