"""Shared builders: hand-built planar networks and random instance generators.

Unit fixtures construct DynamicNetwork objects directly (exact planar meters,
explicit travel times and capacities) so expected values stay exact; the
file-ingestion path has its own tests.
"""

from __future__ import annotations

import random

from evacflow.fire import FireScenario, GrowingCircle
from evacflow.geometry import Point, polyline
from evacflow.roadnet import Arc, DynamicNetwork, RoadNode


def make_net(nodes, arcs, dt=60, origin=(0.0, 0.0)) -> DynamicNetwork:
    """nodes: {id: (x, y, supply, demand)}; arcs: {(u, v): (lam, cap)} with
    straight-segment geometry between the endpoints."""
    rn = {nid: RoadNode(Point(x, y), s, d) for nid, (x, y, s, d) in nodes.items()}
    ra = {}
    for (u, v), (lam, cap) in arcs.items():
        geom = polyline([rn[u].point, rn[v].point])
        ra[(u, v)] = Arc(lam, cap, geom, f"{u}-{v}", 1, 10.0)
    return DynamicNetwork(dt, origin, rn, ra)


def fig_net(supply=5, demand=5) -> DynamicNetwork:
    """The three-node dynamic network used throughout: arcs n1->n2 and n1->n3
    with travel time 1, n2->n3 with travel time 2; n1 the source, n3 the sink.
    Sorted ids give base indices n1=1, n2=2, n3=3."""
    return make_net(
        nodes={
            "n1": (0.0, 0.0, supply, 0),
            "n2": (0.0, 600.0, 0, 0),
            "n3": (600.0, 0.0, 0, demand),
        },
        arcs={
            ("n1", "n2"): (1, 24),
            ("n1", "n3"): (1, 24),
            ("n2", "n3"): (2, 22),
        },
    )


def fig_fire() -> FireScenario:
    """Circle 12 m west of n1, radius 10 + t: overtakes n1 exactly at t=2
    and nothing else within small horizons; every arc keeps full capacity."""
    return FireScenario(circles=(GrowingCircle(Point(-12.0, 0.0), 10.0, 1.0),))


def far_fire() -> FireScenario:
    """A fire too far away to matter for two dozen instances."""
    return FireScenario(circles=(GrowingCircle(Point(-1e6, 0.0), 10.0, 1.0),))


def line_net(supply=10, cap=3, lam=2) -> DynamicNetwork:
    """Source - single road - sink. With cap per instance and travel lam the
    minimal complete horizon is lam + ceil(supply/cap) - 1."""
    return make_net(
        nodes={"a": (0.0, 0.0, supply, 0), "b": (1000.0, 0.0, 0, supply)},
        arcs={("a", "b"): (lam, cap)},
    )


def random_net(rng: random.Random, max_nodes=8, max_supply=20, coord_span=400.0) -> DynamicNetwork:
    """Small random connected network with 1-2 sources and 1-2 sinks."""
    n = rng.randint(3, max_nodes)
    ids = [f"v{i}" for i in range(n)]
    pos = {nid: (rng.uniform(0, coord_span), rng.uniform(0, coord_span)) for nid in ids}
    arcs: dict[tuple[str, str], tuple[int, int]] = {}
    order = ids[:]
    rng.shuffle(order)
    for a, b in zip(order, order[1:]):  # random spanning path keeps it connected
        arcs[(a, b)] = (rng.randint(1, 3), rng.randint(1, 8))
        if rng.random() < 0.8:
            arcs[(b, a)] = (rng.randint(1, 3), rng.randint(1, 8))
    for _ in range(rng.randint(0, 2 * n)):
        a, b = rng.sample(ids, 2)
        if (a, b) not in arcs:
            arcs[(a, b)] = (rng.randint(1, 3), rng.randint(1, 8))

    k_src = rng.randint(1, 2)
    k_snk = rng.randint(1, 2)
    picked = rng.sample(ids, k_src + k_snk)
    sources, sinks = picked[:k_src], picked[k_src:]
    supply_left = rng.randint(k_src, max_supply)
    nodes = {}
    for nid in ids:
        s = d = 0
        if nid in sources:
            s = max(1, supply_left // k_src)
        if nid in sinks:
            d = rng.randint(max_supply // 2 + 1, max_supply + 5)
        nodes[nid] = (*pos[nid], s, d)
    return make_net(nodes, arcs)


def random_fire(rng: random.Random, span=400.0) -> FireScenario:
    circles = tuple(
        GrowingCircle(
            Point(rng.uniform(-span / 2, span * 1.5), rng.uniform(-span / 2, span * 1.5)),
            rng.uniform(5.0, span / 4),
            rng.choice([0.0, 0.5, 1.0, 2.0]),
        )
        for _ in range(rng.randint(1, 3))
    )
    return FireScenario(circles=circles)
