"""Wildfire time-expanded network: the TEN with overtaken node copies
removed, movement capacities scaled by fire proximity, and a super
source/sink attached for multi-source multi-sink max flow."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import InfeasibleError
from .fire import FireCache
from .roadnet import DynamicNetwork
from .ten import node_label

SUPER_SOURCE = 0

# Below this fraction of surviving capacity the road is considered unusable.
CUTOFF = 0.2


def capacity_fraction(f: float, lam: int) -> float:
    """Fraction of an arc's capacity surviving at fire distance f meters.

    Full capacity once the fire is at least the travel time away (growth of
    one meter per instance makes meters and instances commensurate), f/λ
    below that. Callers zero the capacity when the fraction drops under 20%.
    """
    if f >= lam:
        return 1.0
    return f / lam


def scaled_capacity(u: int, f: float, lam: int) -> int:
    p = capacity_fraction(f, lam)
    if p < CUTOFF:
        return 0
    return math.floor(u * p)


@dataclass
class Wten:
    T: int                      # horizon in local instances (after any shift)
    n_base: int
    ids: tuple[str, ...]
    t_offset: int               # local instance 0 corresponds to absolute t_offset
    alive: list[bool]           # indexed by label; [0] unused
    movement_arcs: list[tuple[int, int, int]]
    holdover_arcs: list[tuple[int, int, int]]
    super_source_arcs: list[tuple[int, int]]   # (source label, capacity)
    super_sink_arcs: list[tuple[int, int]]     # (sink label, capacity)
    sink_tmax: dict[str, int]                  # sink id -> local t_max
    u_max: int = 0                             # sum of super-source capacities
    _sink_set: frozenset[str] = field(default=frozenset(), repr=False)

    @property
    def super_sink(self) -> int:
        return (self.T + 1) * self.n_base + 1

    def alive_labels(self) -> list[int]:
        return [lab for lab in range(1, (self.T + 1) * self.n_base + 1) if self.alive[lab]]

    def all_arcs(self) -> list[tuple[int, int, int, str]]:
        out = [(u, v, c, "movement") for u, v, c in self.movement_arcs]
        out += [(u, v, c, "holdover") for u, v, c in self.holdover_arcs]
        out += [(SUPER_SOURCE, lab, c, "super") for lab, c in self.super_source_arcs]
        out += [(lab, self.super_sink, c, "super") for lab, c in self.super_sink_arcs]
        return out

    def dump_edge_list(self) -> str:
        lines = [f"{u} {v} {c} {kind}" for u, v, c, kind in self.all_arcs()]
        lines.sort(key=lambda s: (int(s.split()[0]), int(s.split()[1])))
        return "\n".join(lines) + "\n"


def build_wten(net: DynamicNetwork, cache: FireCache, T: int) -> Wten:
    """Assemble the hazard-adjusted expanded network over [0..T].

    Node copies overtaken by the fire are dropped; movement arcs survive only
    with both endpoint copies alive, at capacity floor(u * p) (zeroed below
    the 20% cutoff, but kept in the arc list so index maps stay stable).
    Sinks terminate at their last un-overtaken copy.
    """
    if cache.T < T:
        raise ValueError(f"fire cache covers [0..{cache.T}], need [0..{T}]")
    wten = _assemble(
        net,
        cache,
        t_lo=0,
        t_hi=T,
        source_caps={nid: sup for nid, sup in net.sources()},
        sink_caps={nid: dem for nid, dem in net.sinks()},
    )
    if net.total_supply() > 0:
        if not wten.super_sink_arcs:
            raise InfeasibleError("no reachable sink: every sink is overtaken at t=0")
        if not wten.super_source_arcs:
            raise InfeasibleError("nothing to evacuate safely: every source is overtaken at t=0")
    return wten


def build_shifted_wten(
    net: DynamicNetwork,
    cache: FireCache,
    t_reopt: int,
    T: int,
    new_sources: dict[int, int],
    sink_caps: dict[str, int],
) -> tuple[Wten, dict[int, int]]:
    """Expanded network for a plan update, over absolute instances
    [t_reopt..T] relabeled to [0..T-t_reopt].

    new_sources maps absolute labels (instance >= t_reopt) to supplies; those
    whose copy is overtaken under the updated fire are dropped and returned
    separately (people caught in transit). Holdover stays at the original
    sources and sinks, per-sink super capacities come from sink_caps.
    """
    n = len(net.node_index())
    shift = t_reopt * n
    shifted: dict[int, int] = {}
    dropped: dict[int, int] = {}
    for lab in sorted(new_sources):
        t = (lab - 1) // n
        if not (t_reopt <= t <= T):
            raise ValueError(f"new source label {lab} outside [{t_reopt}..{T}]")
        shifted[lab - shift] = shifted.get(lab - shift, 0) + new_sources[lab]
    wten = _assemble(
        net,
        cache,
        t_lo=t_reopt,
        t_hi=T,
        source_caps=None,
        sink_caps=sink_caps,
        explicit_sources=shifted,
    )
    still: list[tuple[int, int]] = []
    for lab, sup in wten.super_source_arcs:
        if wten.alive[lab]:
            still.append((lab, sup))
        else:
            dropped[lab + shift] = dropped.get(lab + shift, 0) + sup
    wten.super_source_arcs = still
    wten.u_max = sum(c for _, c in still)
    return wten, dropped


def _assemble(net, cache, t_lo, t_hi, source_caps, sink_caps, explicit_sources=None) -> Wten:
    index = net.node_index()
    ids = net.index_to_id()
    n = len(index)
    T = t_hi - t_lo

    alive = [False] * ((T + 1) * n + 1)
    for t in range(T + 1):
        over = cache.overtaken[t + t_lo]
        base = n * t
        for i, nid in enumerate(ids, start=1):
            alive[base + i] = nid not in over

    movement = []
    for (u, v), arc in sorted(net.arcs.items()):
        iu, iv = index[u], index[v]
        lam = arc.travel_time
        cap0 = arc.capacity
        dist_rows = cache.arc_dist
        for t in range(0, T - lam + 1):
            lu = iu + n * t
            lv = iv + n * (t + lam)
            if alive[lu] and alive[lv]:
                f = dist_rows[t + t_lo][(u, v)]
                movement.append((lu, lv, scaled_capacity(cap0, f, lam)))

    holdover = []
    hold_nodes = sorted(set((source_caps or {})) | set(sink_caps)) if source_caps is not None else sorted(
        set(nid for nid, node in net.nodes.items() if node.supply > 0) | set(sink_caps)
    )
    for nid in hold_nodes:
        node = net.nodes[nid]
        cap = node.supply if node.supply > 0 else node.demand
        i = index[nid]
        for t in range(T):
            lu = i + n * t
            lv = i + n * (t + 1)
            if alive[lu] and alive[lv]:
                holdover.append((lu, lv, cap))

    if explicit_sources is None:
        super_source_arcs = [
            (index[nid] + 0, cap)
            for nid, cap in sorted(source_caps.items())
            if alive[index[nid]]
        ]
    else:
        super_source_arcs = sorted(explicit_sources.items())

    sink_tmax: dict[str, int] = {}
    super_sink_arcs = []
    for nid, cap in sorted(sink_caps.items()):
        i = index[nid]
        tmax = None
        for t in range(T, -1, -1):
            if alive[i + n * t]:
                tmax = t
                break
        if tmax is None:
            continue  # sink gone before this window; soft-degrade
        sink_tmax[nid] = tmax
        if cap > 0:
            super_sink_arcs.append((i + n * tmax, cap))

    return Wten(
        T=T,
        n_base=n,
        ids=ids,
        t_offset=t_lo,
        alive=alive,
        movement_arcs=movement,
        holdover_arcs=holdover,
        super_source_arcs=super_source_arcs,
        super_sink_arcs=super_sink_arcs,
        sink_tmax=sink_tmax,
        u_max=sum(c for _, c in super_source_arcs),
        _sink_set=frozenset(sink_caps),
    )
