"""Maximum flow over the expanded network and route decomposition.

Dinic's algorithm is the production solver; Edmonds-Karp (solve_reference)
exists so two independent implementations can cross-check each other in
tests. Both are deterministic: arcs are processed in sorted label order.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .wten import SUPER_SOURCE, Wten


@dataclass
class FlowSolution:
    value: int
    arc_flow: dict[tuple[int, int], int]   # only arcs carrying flow > 0


@dataclass(frozen=True)
class Route:
    amount: int
    path: tuple[int, ...]   # labels, super source first, super sink last


@dataclass
class RouteBundle:
    routes: list[Route]

    @property
    def total(self) -> int:
        return sum(r.amount for r in self.routes)


class _Residual:
    """Compact residual graph; edge 2k is forward, 2k+1 its reverse."""

    def __init__(self, arcs: list[tuple[int, int, int]], s: int, t: int):
        labels = {s, t}
        for u, v, _ in arcs:
            labels.add(u)
            labels.add(v)
        self.order = sorted(labels)
        self.idx = {lab: i for i, lab in enumerate(self.order)}
        self.V = len(self.order)
        self.s = self.idx[s]
        self.t = self.idx[t]
        self.eto: list[int] = []
        self.ecap: list[int] = []
        self.adj: list[list[int]] = [[] for _ in range(self.V)]
        self.arcs: list[tuple[int, int, int]] = []
        for u, v, c in sorted(arcs):
            if c <= 0:
                continue  # zero-capacity arcs cannot carry flow
            self.arcs.append((u, v, c))
            a, b = self.idx[u], self.idx[v]
            self.adj[a].append(len(self.eto))
            self.eto.append(b)
            self.ecap.append(c)
            self.adj[b].append(len(self.eto))
            self.eto.append(a)
            self.ecap.append(0)

    def flows(self) -> dict[tuple[int, int], int]:
        out = {}
        for k, (u, v, c) in enumerate(self.arcs):
            fl = c - self.ecap[2 * k]
            if fl > 0:
                out[(u, v)] = fl
        return out


def _dinic(g: _Residual) -> int:
    eto, ecap, adj = g.eto, g.ecap, g.adj
    s, t, V = g.s, g.t, g.V
    total = 0
    while True:
        level = [-1] * V
        level[s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            lu = level[u] + 1
            for e in adj[u]:
                v = eto[e]
                if ecap[e] > 0 and level[v] < 0:
                    level[v] = lu
                    q.append(v)
        if level[t] < 0:
            return total
        it = [0] * V
        path: list[int] = []
        u = s
        while True:
            if u == t:
                aug = min(ecap[e] for e in path)
                total += aug
                cut = 0
                for k, e in enumerate(path):
                    ecap[e] -= aug
                    ecap[e ^ 1] += aug
                    if ecap[e] == 0 and cut == 0 and k >= 0:
                        cut = k + 1  # first saturated edge, 1-based
                del path[cut - 1 :]
                u = eto[path[-1]] if path else s
                continue
            advanced = False
            ad = adj[u]
            i = it[u]
            n_ad = len(ad)
            while i < n_ad:
                e = ad[i]
                v = eto[e]
                if ecap[e] > 0 and level[v] == level[u] + 1:
                    it[u] = i
                    path.append(e)
                    u = v
                    advanced = True
                    break
                i += 1
            if advanced:
                continue
            it[u] = i
            if u == s:
                break
            level[u] = -1  # dead end in this phase
            e = path.pop()
            u = eto[e ^ 1]
            it[u] += 1


def _edmonds_karp(g: _Residual) -> int:
    eto, ecap, adj = g.eto, g.ecap, g.adj
    s, t, V = g.s, g.t, g.V
    total = 0
    while True:
        parent_edge = [-1] * V
        parent_edge[s] = -2
        q = deque([s])
        while q:
            u = q.popleft()
            if u == t:
                break
            for e in adj[u]:
                v = eto[e]
                if ecap[e] > 0 and parent_edge[v] == -1:
                    parent_edge[v] = e
                    q.append(v)
        if parent_edge[t] == -1:
            return total
        aug = None
        v = t
        while v != s:
            e = parent_edge[v]
            aug = ecap[e] if aug is None else min(aug, ecap[e])
            v = eto[e ^ 1]
        v = t
        while v != s:
            e = parent_edge[v]
            ecap[e] -= aug
            ecap[e ^ 1] += aug
            v = eto[e ^ 1]
        total += aug


def _solve(wten: Wten, algorithm) -> FlowSolution:
    arcs = [(u, v, c) for u, v, c, _ in wten.all_arcs()]
    g = _Residual(arcs, SUPER_SOURCE, wten.super_sink)
    value = algorithm(g)
    return FlowSolution(value, g.flows())


def solve_dinic(wten: Wten) -> FlowSolution:
    """Maximum super-source to super-sink flow via blocking flows."""
    return _solve(wten, _dinic)


def solve_reference(wten: Wten) -> FlowSolution:
    """Independent oracle: shortest-augmenting-path (Edmonds-Karp)."""
    return _solve(wten, _edmonds_karp)


def check_flow(wten: Wten, sol: FlowSolution) -> None:
    """Raise ValueError unless sol is a feasible flow of its stated value."""
    caps: dict[tuple[int, int], int] = {}
    for u, v, c, _ in wten.all_arcs():
        caps[(u, v)] = max(caps.get((u, v), 0), c)
    balance: dict[int, int] = {}
    for (u, v), fl in sol.arc_flow.items():
        if (u, v) not in caps:
            raise ValueError(f"flow on unknown arc ({u}, {v})")
        if not (0 <= fl <= caps[(u, v)]):
            raise ValueError(f"arc ({u}, {v}): flow {fl} outside [0, {caps[(u, v)]}]")
        balance[u] = balance.get(u, 0) - fl
        balance[v] = balance.get(v, 0) + fl
    src = balance.pop(SUPER_SOURCE, 0)
    snk = balance.pop(wten.super_sink, 0)
    if -src != sol.value or snk != sol.value:
        raise ValueError(f"value {sol.value} != source out {-src} / sink in {snk}")
    for lab, b in balance.items():
        if b != 0:
            raise ValueError(f"conservation violated at label {lab}: {b}")


def decompose(wten: Wten, sol: FlowSolution) -> RouteBundle:
    """Peel the flow into super-source-to-super-sink paths.

    At each node the smallest-label next hop with remaining flow is taken, so
    routes are stable run to run. The expanded network is a DAG, so at most
    one arc is exhausted per peel and the loop ends within |A| rounds.
    """
    check_flow(wten, sol)
    rem = dict(sol.arc_flow)
    succ: dict[int, list[int]] = {}
    for (u, v) in rem:
        succ.setdefault(u, []).append(v)
    for vs in succ.values():
        vs.sort()
    routes: list[Route] = []
    sink = wten.super_sink
    while True:
        outs = [v for v in succ.get(SUPER_SOURCE, []) if rem.get((SUPER_SOURCE, v), 0) > 0]
        if not outs:
            break
        path = [SUPER_SOURCE]
        u = SUPER_SOURCE
        while u != sink:
            v = next(w for w in succ[u] if rem.get((u, w), 0) > 0)
            path.append(v)
            u = v
        amount = min(rem[(a, b)] for a, b in zip(path, path[1:]))
        for a, b in zip(path, path[1:]):
            rem[(a, b)] -= amount
        routes.append(Route(amount, tuple(path)))
    return RouteBundle(routes)
