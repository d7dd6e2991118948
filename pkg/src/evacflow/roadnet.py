"""Road-network ingestion: JSON documents to a planar DynamicNetwork.

Travel times are integer time instances (>= 1), capacities integer people
per instance. Arcs are directed; a two-way road in the input becomes two
opposing arcs sharing (reversed) geometry.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field, replace

from .errors import InputError
from .geometry import Point, Polyline, polyline, polyline_length, project

# Moore-method defaults: 5 m vehicle length, 2 s reaction headway, one
# evacuee per vehicle. Exposed as arguments for other assumptions.
VEHICLE_LENGTH_M = 5.0
REACTION_TIME_S = 2.0
OCCUPANCY = 1.0


@dataclass(frozen=True)
class RoadNode:
    point: Point
    supply: int = 0
    demand: int = 0


@dataclass(frozen=True)
class Arc:
    travel_time: int        # time instances, >= 1
    capacity: int           # people per instance
    geometry: Polyline
    road_name: str
    lanes: int
    speed: float            # m/s


@dataclass
class DynamicNetwork:
    dt_seconds: int
    origin: tuple[float, float]                 # projection origin (lat, lon)
    nodes: dict[str, RoadNode]
    arcs: dict[tuple[str, str], Arc]
    horizon_hint: int | None = None
    _index: dict[str, int] = field(default=None, repr=False, compare=False)

    def node_index(self) -> dict[str, int]:
        """Stable 1-based node indexing (sorted ids)."""
        if self._index is None:
            self._index = {nid: i + 1 for i, nid in enumerate(sorted(self.nodes))}
        return self._index

    def index_to_id(self) -> tuple[str, ...]:
        return tuple(sorted(self.nodes))

    def sources(self) -> list[tuple[str, int]]:
        return [(nid, n.supply) for nid, n in sorted(self.nodes.items()) if n.supply > 0]

    def sinks(self) -> list[tuple[str, int]]:
        return [(nid, n.demand) for nid, n in sorted(self.nodes.items()) if n.demand > 0]

    def total_supply(self) -> int:
        return sum(n.supply for n in self.nodes.values())


def moore_capacity(
    speed: float,
    lanes: int,
    dt: float,
    vehicle_length: float = VEHICLE_LENGTH_M,
    reaction_time: float = REACTION_TIME_S,
    occupancy: float = OCCUPANCY,
) -> int:
    """Road capacity in people per instance from the safe-headway flow rate.

    Per-lane flow is speed / (vehicle_length + speed * reaction_time)
    vehicles per second; the total is rounded down.
    """
    if lanes < 1:
        raise InputError(f"lanes must be >= 1, got {lanes}")
    if speed <= 0:
        return 0
    q = speed / (vehicle_length + speed * reaction_time)
    return math.floor(q * lanes * dt * occupancy)


def round_travel_time(seconds: float, dt: float) -> int:
    """Seconds to whole instances, rounded up, never below 1."""
    if seconds < 0 or dt <= 0:
        raise InputError("travel seconds must be >= 0 and dt > 0")
    return max(1, math.ceil(seconds / dt))


def network_from_dict(doc: dict) -> DynamicNetwork:
    """Build a DynamicNetwork from a parsed network document.

    Projects every coordinate about the node centroid, derives travel times
    from polyline length / speed and capacities via moore_capacity, then
    checks the graph is connected.
    """
    if not isinstance(doc, dict) or "nodes" not in doc or "edges" not in doc:
        raise InputError("network document must have 'nodes' and 'edges'")
    dt = int(doc.get("dt_seconds", 60))
    if dt <= 0:
        raise InputError("dt_seconds must be positive")

    raw_nodes = doc["nodes"]
    if not raw_nodes:
        raise InputError("network has no nodes")
    try:
        lat0 = sum(float(n["lat"]) for n in raw_nodes) / len(raw_nodes)
        lon0 = sum(float(n["lon"]) for n in raw_nodes) / len(raw_nodes)
    except (KeyError, TypeError) as exc:
        raise InputError(f"node missing lat/lon: {exc}") from exc
    origin = (lat0, lon0)

    nodes: dict[str, RoadNode] = {}
    for n in raw_nodes:
        nid = str(n["id"])
        if nid in nodes:
            raise InputError(f"duplicate node id {nid!r}")
        supply = int(n.get("supply", 0) or 0)
        demand = int(n.get("demand", 0) or 0)
        if supply < 0 or demand < 0:
            raise InputError(f"node {nid!r}: supply/demand must be >= 0")
        if supply > 0 and demand > 0:
            raise InputError(f"node {nid!r}: cannot be both source and sink")
        nodes[nid] = RoadNode(project(float(n["lat"]), float(n["lon"]), origin), supply, demand)

    arcs: dict[tuple[str, str], Arc] = {}

    def add_arc(u: str, v: str, geom: Polyline, e: dict) -> None:
        if u == v:
            return  # self-loops carry no evacuation flow
        speed = float(e["speed_mps"])
        if speed <= 0:
            raise InputError(f"edge {u}->{v}: speed must be positive")
        lanes = int(e.get("lanes", 1))
        lam = round_travel_time(polyline_length(geom) / speed, dt)
        cap = moore_capacity(speed, lanes, dt)
        arc = Arc(lam, cap, geom, str(e.get("name", "")), lanes, speed)
        prev = arcs.get((u, v))
        if prev is not None:
            # parallel input roads: keep the most permissive one
            arc = arc if (arc.capacity, -arc.travel_time) > (prev.capacity, -prev.travel_time) else prev
        arcs[(u, v)] = arc

    for e in doc["edges"]:
        u, v = str(e["u"]), str(e["v"])
        for nid in (u, v):
            if nid not in nodes:
                raise InputError(f"missing node: edge {u}->{v} references {nid!r}")
        try:
            geom = polyline([project(float(la), float(lo), origin) for la, lo in e["geometry"]])
        except (KeyError, TypeError) as exc:
            raise InputError(f"edge {u}->{v}: bad geometry: {exc}") from exc
        add_arc(u, v, geom, e)
        if not e.get("oneway", False):
            add_arc(v, u, tuple(reversed(geom)), e)

    net = DynamicNetwork(dt, origin, nodes, arcs)
    _check_connected(net)
    return net


def load_network(path: str) -> DynamicNetwork:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read network file {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path!r}: {exc}") from exc
    return network_from_dict(doc)


def _check_connected(net: DynamicNetwork) -> None:
    """Undirected reachability over all arcs; raises on a split network."""
    if not net.nodes:
        raise InputError("network has no nodes")
    adj: dict[str, list[str]] = {nid: [] for nid in net.nodes}
    for (u, v) in net.arcs:
        adj[u].append(v)
        adj[v].append(u)
    start = next(iter(net.nodes))
    seen = {start}
    stack = [start]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    if len(seen) != len(net.nodes):
        missing = sorted(set(net.nodes) - seen)[:5]
        raise InputError(f"disconnected network: {len(net.nodes) - len(seen)} unreachable nodes, e.g. {missing}")


def contract(net: DynamicNetwork, tolerance: float) -> DynamicNetwork:
    """Merge node pairs closer than tolerance meters, iteratively.

    Each merge places the survivor at the pair's midpoint, sums supplies and
    demands, drops the connecting arcs, and keeps the most permissive of any
    parallel arcs (max capacity, then min travel time). Merging a source into
    a sink is an error.
    """
    if tolerance < 0:
        raise InputError("tolerance must be >= 0")
    nodes = dict(net.nodes)
    arcs = dict(net.arcs)
    if tolerance == 0:
        return replace(net, nodes=nodes, arcs=arcs)

    while True:
        pair = _closest_pair_below(nodes, tolerance)
        if pair is None:
            break
        keep, gone = pair
        a, b = nodes[keep], nodes[gone]
        if (a.supply > 0 and b.demand > 0) or (a.demand > 0 and b.supply > 0):
            raise InputError(f"source/sink collision: cannot merge {keep!r} and {gone!r}")
        mid = Point((a.point.x + b.point.x) / 2, (a.point.y + b.point.y) / 2)
        nodes[keep] = RoadNode(mid, a.supply + b.supply, a.demand + b.demand)
        del nodes[gone]
        moved: dict[tuple[str, str], Arc] = {}
        for (u, v), arc in arcs.items():
            nu = keep if u == gone else u
            nv = keep if v == gone else v
            if nu == nv:
                continue
            prev = moved.get((nu, nv))
            if prev is None or (arc.capacity, -arc.travel_time) > (prev.capacity, -prev.travel_time):
                moved[(nu, nv)] = arc
        arcs = moved

    return DynamicNetwork(net.dt_seconds, net.origin, nodes, arcs, net.horizon_hint)


def _closest_pair_below(nodes: dict[str, RoadNode], tolerance: float):
    """Closest node pair with distance < tolerance, ties broken by id.

    Quadratic scan; contraction runs once per network at ingest time.
    """
    best = None
    best_key = None
    items = sorted(nodes.items())
    for i, (ida, na) in enumerate(items):
        for idb, nb in items[i + 1 :]:
            d = math.hypot(na.point.x - nb.point.x, na.point.y - nb.point.y)
            if d < tolerance:
                key = (d, ida, idb)
                if best_key is None or key < best_key:
                    best_key = key
                    best = (ida, idb)
    return best


def nearest_sink_costs(net: DynamicNetwork) -> dict[str, tuple[int, int]]:
    """Per source: (travel time, hop count) of its quickest path to any sink.

    One Dijkstra from all sinks over reversed arcs, relaxing on
    (travel time, hops) so the reported path is the min-hop one among the
    quickest. Raises if some source reaches no sink.
    """
    sinks = [nid for nid, n in net.nodes.items() if n.demand > 0]
    sources = [nid for nid, n in net.nodes.items() if n.supply > 0]
    radj: dict[str, list[tuple[str, int]]] = {nid: [] for nid in net.nodes}
    for (u, v), arc in net.arcs.items():
        radj[v].append((u, arc.travel_time))
    dist: dict[str, tuple[int, int]] = {}
    heap: list[tuple[int, int, str]] = [(0, 0, s) for s in sorted(sinks)]
    while heap:
        d, h, nid = heapq.heappop(heap)
        if nid in dist:
            continue
        dist[nid] = (d, h)
        for w, lam in radj[nid]:
            if w not in dist:
                heapq.heappush(heap, (d + lam, h + 1, w))
    out = {}
    for s in sources:
        if s not in dist:
            raise InputError(f"infeasible source: {s!r} reaches no sink")
        out[s] = dist[s]
    return out


def bare_horizon(net: DynamicNetwork) -> int:
    """Longest of the quickest source-to-sink travel times: a true lower
    bound on any complete-evacuation horizon."""
    costs = nearest_sink_costs(net)
    if not costs:
        return 0
    return max(d for d, _ in costs.values())


def initial_horizon(net: DynamicNetwork) -> int:
    """Starting horizon for the planner loop: travel time of the longest
    quickest path plus its arc count (cuts loop iterations in practice)."""
    costs = nearest_sink_costs(net)
    if not costs:
        return 0
    d, h = max(costs.values())
    return d + h
