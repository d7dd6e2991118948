"""Plain time-expanded network: one copy of every node per instance,
movement arcs spanning travel times, holdover arcs at sources and sinks."""

from __future__ import annotations

from dataclasses import dataclass

from .roadnet import DynamicNetwork


def node_label(i: int, t: int, n: int) -> int:
    """Label of base node i (1-based) at instance t: i + n*t."""
    return i + n * t


def decode_label(label: int, n: int) -> tuple[int, int]:
    """Inverse of node_label: label -> (base index, instance)."""
    t, i = divmod(label - 1, n)
    return i + 1, t


@dataclass
class Ten:
    T: int
    n_base: int
    ids: tuple[str, ...]                       # index-1 .. index-n base node ids
    movement_arcs: list[tuple[int, int, int]]  # (from label, to label, capacity)
    holdover_arcs: list[tuple[int, int, int]]
    sources: list[int]                         # source labels at t=0
    sinks: list[int]                           # sink labels at t=T

    def labels(self) -> range:
        return range(1, (self.T + 1) * self.n_base + 1)

    def dump_edge_list(self) -> str:
        """Deterministic debug dump, one arc per line: from to capacity kind."""
        lines = [f"{u} {v} {c} movement" for u, v, c in self.movement_arcs]
        lines += [f"{u} {v} {c} holdover" for u, v, c in self.holdover_arcs]
        lines.sort(key=lambda s: (int(s.split()[0]), int(s.split()[1])))
        return "\n".join(lines) + "\n"


def build_ten(net: DynamicNetwork, T: int, holdover_all: bool = False) -> Ten:
    """Expand a dynamic network over horizon T.

    Movement arc (i(t), j(t+λ)) exists iff t+λ <= T and carries the base
    capacity; holdover arcs (i(t), i(t+1)) exist for sources and sinks (or
    every node with holdover_all) with the node's supply-or-demand capacity.
    Runs in O(T * (|A| + |N|)).
    """
    if T < 0:
        raise ValueError("horizon must be >= 0")
    index = net.node_index()
    n = len(index)
    movement = []
    for (u, v), arc in sorted(net.arcs.items()):
        iu, iv = index[u], index[v]
        lam = arc.travel_time
        for t in range(0, T - lam + 1):
            movement.append((node_label(iu, t, n), node_label(iv, t + lam, n), arc.capacity))
    holdover = []
    unbounded = net.total_supply()  # waiting cap for plain nodes under holdover_all
    for nid in sorted(net.nodes):
        node = net.nodes[nid]
        if not holdover_all and node.supply == 0 and node.demand == 0:
            continue
        cap = node.supply if node.supply > 0 else (node.demand if node.demand > 0 else unbounded)
        i = index[nid]
        for t in range(T):
            holdover.append((node_label(i, t, n), node_label(i, t + 1, n), cap))
    sources = [node_label(index[nid], 0, n) for nid, _ in net.sources()]
    sinks = [node_label(index[nid], T, n) for nid, _ in net.sinks()]
    return Ten(T, n, net.index_to_id(), movement, holdover, sources, sinks)
