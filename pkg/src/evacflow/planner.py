"""Top-level planning procedures: the minimal-horizon search for an initial
evacuation plan and the mid-evacuation update that re-optimizes everything
from a chosen instance onward while freezing what already happened.

Plans are stored as lists of per-arc flow entries in absolute time, so an
updated plan is literally the previous plan's prefix (departures before
t_reopt) stitched to a freshly solved suffix.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field

from .errors import InputError
from .fire import (
    FireScenario,
    build_cache,
    merge_scenarios,
    scenario_from_dict,
    scenario_to_dict,
)
from .maxflow import FlowSolution, decompose, solve_dinic
from .roadnet import DynamicNetwork, bare_horizon, initial_horizon
from .wten import SUPER_SOURCE, Wten, build_shifted_wten, build_wten

SUPER_SINK_OUT = -1   # serialized stand-in for the super sink label


@dataclass(frozen=True)
class FlowEntry:
    u: int                      # absolute label (0 = super source)
    v: int                      # absolute label (-1 = super sink)
    base_edge: tuple[str, str]
    depart_t: int
    arrive_t: int
    flow: int
    kind: str                   # movement | holdover | super


@dataclass
class PhaseTimings:
    fire_model: float = 0.0
    wten_construction: float = 0.0
    max_flow: float = 0.0
    total: float = 0.0


@dataclass
class RunReport:
    timings: PhaseTimings
    base_nodes: int = 0
    base_arcs: int = 0
    wten_nodes: int = 0
    wten_arcs: int = 0
    horizons_tried: int = 0
    summary: dict = field(default_factory=dict)


@dataclass
class EvacuationPlan:
    t_sol: int
    dt_seconds: int
    complete: bool
    evacuated: int
    stranded: int
    total_supply: int
    t_reopt: int                     # 0 for an initial plan
    scenario_doc: dict
    fingerprint: str
    flows: list[FlowEntry]
    routes: list[tuple[int, list[dict]]]
    stuck: dict[int, int] = field(default_factory=dict)
    report: RunReport | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class UpdateRequest:
    t_reopt: int
    t_fire: int
    new_scenario: FireScenario


def scenario_fingerprint(doc: dict) -> str:
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def _abs_label(i: int, t_abs: int, n: int) -> int:
    return i + n * t_abs


def solution_entries(wten: Wten, sol: FlowSolution) -> list[FlowEntry]:
    """Positive flows of a solved WTEN as plan entries in absolute time."""
    n = wten.n_base
    off = wten.t_offset
    ids = wten.ids
    sink = wten.super_sink
    out = []
    for (u, v), fl in sorted(sol.arc_flow.items()):
        if u == SUPER_SOURCE:
            ti, tt = divmod(v - 1, n)[1] + 1, (v - 1) // n
            nid = ids[ti - 1]
            lab = _abs_label(ti, tt + off, n)
            out.append(FlowEntry(SUPER_SOURCE, lab, (nid, nid), tt + off, tt + off, fl, "super"))
        elif v == sink:
            ti, tt = divmod(u - 1, n)[1] + 1, (u - 1) // n
            nid = ids[ti - 1]
            lab = _abs_label(ti, tt + off, n)
            out.append(FlowEntry(lab, SUPER_SINK_OUT, (nid, nid), tt + off, tt + off, fl, "super"))
        else:
            iu, tu = (u - 1) % n + 1, (u - 1) // n
            iv, tv = (v - 1) % n + 1, (v - 1) // n
            kind = "holdover" if iu == iv else "movement"
            out.append(
                FlowEntry(
                    _abs_label(iu, tu + off, n),
                    _abs_label(iv, tv + off, n),
                    (ids[iu - 1], ids[iv - 1]),
                    tu + off,
                    tv + off,
                    fl,
                    kind,
                )
            )
    out.sort(key=lambda e: (e.depart_t, e.u, e.v))
    return out


def solution_routes(wten: Wten, sol: FlowSolution) -> list[tuple[int, list[dict]]]:
    """Decomposed routes as (amount, steps) with absolute instants; the super
    source/sink bookkeeping hops are dropped."""
    n = wten.n_base
    off = wten.t_offset
    ids = wten.ids
    bundle = decompose(wten, sol)
    routes = []
    for r in bundle.routes:
        steps = []
        for lab in r.path:
            if lab == SUPER_SOURCE or lab == wten.super_sink:
                continue
            i, t = (lab - 1) % n + 1, (lab - 1) // n
            steps.append({"node": ids[i - 1], "t": t + off})
        routes.append((r.amount, steps))
    return routes


def derive_new_sources(wten: Wten, sol: FlowSolution, t_reopt: int) -> list[tuple[int, int]]:
    """Labels that inherit supply when re-planning from t_reopt.

    Every movement or holdover arc departing before t_reopt and arriving at
    or after it hands its flow to its head label - those people are in
    transit (or still waiting at a source) when the new plan takes over.
    Flow already on a sink's own holdover chain is excluded: those people
    have arrived and stay counted as delivered. With t_reopt = 0 nothing
    precedes the boundary and the original sources keep their full supplies.
    """
    n = wten.n_base
    if t_reopt == 0:
        return sorted(wten.super_source_arcs)
    supplies: dict[int, int] = {}
    sink_ids = wten._sink_set
    for (u, v), fl in sol.arc_flow.items():
        if u == SUPER_SOURCE or v == wten.super_sink or fl <= 0:
            continue
        tu = (u - 1) // n
        tv = (v - 1) // n
        if tu < t_reopt - wten.t_offset <= tv:
            iu = (u - 1) % n + 1
            iv = (v - 1) % n + 1
            if iu == iv and wten.ids[iu - 1] in sink_ids:
                continue  # already at a safe location
            supplies[v] = supplies.get(v, 0) + fl
    return sorted(supplies.items())


# --- initial plan -------------------------------------------------------------


def plan_initial(
    net: DynamicNetwork,
    scenario: FireScenario,
    t_max: int,
    scenario_doc: dict | None = None,
) -> EvacuationPlan:
    """Minimal-horizon maximum-flow evacuation plan (the horizon-search loop).

    Starts at the inflated horizon estimate (quickest-path time plus its arc
    count), growing T while the evacuation is incomplete. The loop stops once
    everyone is out, once T exceeds t_max, or after the flow value stagnates
    for the sum of all travel times (no later horizon can help a monotone
    fire). If the very first probe already evacuates everyone, T is walked
    back down to the smallest complete horizon, which the bare quickest-path
    bound limits from below.
    """
    doc = scenario_doc if scenario_doc is not None else scenario_to_dict(scenario, net.origin)
    total = net.total_supply()
    timings = PhaseTimings()
    report = RunReport(timings, base_nodes=len(net.nodes), base_arcs=len(net.arcs))
    t0_wall = time.perf_counter()

    if total == 0:
        t_sol = initial_horizon(net) if net.sources() else 0
        timings.total = time.perf_counter() - t0_wall
        return EvacuationPlan(
            t_sol, net.dt_seconds, True, 0, 0, 0, 0, doc, scenario_fingerprint(doc), [], [], {}, report
        )

    t_start = initial_horizon(net)
    if t_start > t_max:
        raise InputError(f"t_max={t_max} below the initial horizon {t_start}")
    floor = bare_horizon(net)
    stall_window = sum(a.travel_time for a in net.arcs.values())

    tic = time.perf_counter()
    cache = build_cache(net, scenario, t_start)
    timings.fire_model += time.perf_counter() - tic

    def solve_at(T: int) -> tuple[Wten, FlowSolution]:
        tic = time.perf_counter()
        wten = build_wten(net, cache, T)
        timings.wten_construction += time.perf_counter() - tic
        tic = time.perf_counter()
        sol = solve_dinic(wten)
        timings.max_flow += time.perf_counter() - tic
        report.horizons_tried += 1
        return wten, sol

    T = t_start
    wten, sol = solve_at(T)
    best = (T, wten, sol)

    if sol.value >= total:
        # complete on the first probe; find the smallest complete horizon
        while T - 1 >= floor:
            w2, s2 = solve_at(T - 1)
            if s2.value < total:
                break
            T -= 1
            best = (T, w2, s2)
    else:
        best_value = sol.value
        stalled = 0
        while sol.value < total:
            T += 1
            if T > t_max:
                break
            tic = time.perf_counter()
            cache.extend(net, scenario)
            timings.fire_model += time.perf_counter() - tic
            wten, sol = solve_at(T)
            if sol.value > best_value:
                best_value = sol.value
                best = (T, wten, sol)
                stalled = 0
            else:
                stalled += 1
                if stalled >= stall_window:
                    break

    t_sol, wten, sol = best
    report.wten_nodes = sum(wten.alive) + 2
    report.wten_arcs = len(wten.movement_arcs) + len(wten.holdover_arcs) + len(
        wten.super_source_arcs
    ) + len(wten.super_sink_arcs)
    plan = EvacuationPlan(
        t_sol=t_sol,
        dt_seconds=net.dt_seconds,
        complete=sol.value == total,
        evacuated=sol.value,
        stranded=0,
        total_supply=total,
        t_reopt=0,
        scenario_doc=doc,
        fingerprint=scenario_fingerprint(doc),
        flows=solution_entries(wten, sol),
        routes=solution_routes(wten, sol),
        stuck={},
        report=report,
    )
    timings.total = time.perf_counter() - t0_wall
    report.summary = _plan_summary(plan)
    return plan


# --- plan update --------------------------------------------------------------


def _crossing_from_flows(
    net: DynamicNetwork, flows: list[FlowEntry], t_reopt: int
) -> tuple[dict[int, int], dict[str, int]]:
    """Split a plan's boundary-crossing flow into new-source supplies and
    per-sink amounts already delivered before t_reopt."""
    new_sources: dict[int, int] = {}
    delivered: dict[str, int] = {}
    for e in flows:
        if e.kind == "super":
            if e.v == SUPER_SINK_OUT and e.depart_t < t_reopt:
                delivered[e.base_edge[0]] = delivered.get(e.base_edge[0], 0) + e.flow
            continue
        if e.depart_t < t_reopt <= e.arrive_t:
            if e.kind == "holdover" and net.nodes[e.base_edge[0]].demand > 0:
                delivered[e.base_edge[0]] = delivered.get(e.base_edge[0], 0) + e.flow
            else:
                new_sources[e.v] = new_sources.get(e.v, 0) + e.flow
    return new_sources, delivered


def plan_update(
    net: DynamicNetwork,
    prev: EvacuationPlan,
    req: UpdateRequest,
    t_max: int,
) -> EvacuationPlan:
    """Re-optimize an ongoing evacuation against revised fire data.

    The revised fire applies from req.t_fire but the plan may deviate from
    req.t_reopt on; flow departing before t_reopt is frozen verbatim. People
    whose frozen flow lands them at instances >= t_reopt become the sources
    of a fresh WTEN built over the shifted window [t_reopt..T]; anyone whose
    landing copy the grown fire has overtaken (or who cannot be routed at
    all) is reported as stranded rather than failing the whole plan.
    """
    if not (1 <= req.t_reopt <= req.t_fire <= prev.t_sol):
        raise InputError(
            f"need 1 <= t_reopt <= t_fire <= T ({req.t_reopt}, {req.t_fire}, {prev.t_sol})"
        )
    if t_max < prev.t_sol:
        raise InputError(f"t_max={t_max} below the previous horizon {prev.t_sol}")

    old_scenario = scenario_from_dict(prev.scenario_doc, net.origin)
    combined = merge_scenarios(old_scenario, req.new_scenario, req.t_fire, t_max)
    doc = scenario_to_dict(combined, net.origin)

    timings = PhaseTimings()
    report = RunReport(timings, base_nodes=len(net.nodes), base_arcs=len(net.arcs))
    t0_wall = time.perf_counter()

    new_sources, delivered = _crossing_from_flows(net, prev.flows, req.t_reopt)
    delivered_total = sum(delivered.values())
    sink_caps = {nid: max(0, dem - delivered.get(nid, 0)) for nid, dem in net.sinks()}

    T = prev.t_sol
    tic = time.perf_counter()
    cache = build_cache(net, combined, T)
    timings.fire_model += time.perf_counter() - tic

    def solve_at(T: int) -> tuple[Wten, dict[int, int], FlowSolution]:
        tic = time.perf_counter()
        wten, dropped = build_shifted_wten(net, cache, req.t_reopt, T, new_sources, sink_caps)
        timings.wten_construction += time.perf_counter() - tic
        tic = time.perf_counter()
        sol = solve_dinic(wten)
        timings.max_flow += time.perf_counter() - tic
        report.horizons_tried += 1
        return wten, dropped, sol

    wten, dropped, sol = solve_at(T)
    best = (T, wten, dropped, sol)
    best_value = sol.value
    stall_window = sum(a.travel_time for a in net.arcs.values())
    stalled = 0
    while delivered_total + sol.value < prev.total_supply:
        T += 1
        if T > t_max:
            break
        tic = time.perf_counter()
        cache.extend(net, combined)
        timings.fire_model += time.perf_counter() - tic
        wten, dropped, sol = solve_at(T)
        if sol.value > best_value:
            best_value = sol.value
            best = (T, wten, dropped, sol)
            stalled = 0
        else:
            stalled += 1
            if stalled >= stall_window:
                break

    t_sol, wten, dropped, sol = best
    report.wten_nodes = sum(wten.alive) + 2
    report.wten_arcs = len(wten.movement_arcs) + len(wten.holdover_arcs) + len(
        wten.super_source_arcs
    ) + len(wten.super_sink_arcs)

    # seam accounting: undeliverable crossing supply, per absolute label
    n = wten.n_base
    shift = req.t_reopt * n
    stuck = dict(dropped)
    for lab, sup in wten.super_source_arcs:
        used = sol.arc_flow.get((SUPER_SOURCE, lab), 0)
        if used < sup:
            abs_lab = lab + shift
            stuck[abs_lab] = stuck.get(abs_lab, 0) + (sup - used)

    prefix = [e for e in prev.flows if e.depart_t < req.t_reopt]
    suffix = [e for e in solution_entries(wten, sol) if e.u != SUPER_SOURCE]
    flows = prefix + suffix
    flows.sort(key=lambda e: (e.depart_t, e.u, e.v))

    routes = _truncated_prefix_routes(net, prev.routes, req.t_reopt)
    routes += solution_routes(wten, sol)

    evacuated = delivered_total + sol.value
    plan = EvacuationPlan(
        t_sol=t_sol,
        dt_seconds=net.dt_seconds,
        complete=evacuated == prev.total_supply,
        evacuated=evacuated,
        stranded=sum(stuck.values()),
        total_supply=prev.total_supply,
        t_reopt=req.t_reopt,
        scenario_doc=doc,
        fingerprint=scenario_fingerprint(doc),
        flows=flows,
        routes=routes,
        stuck=stuck,
        report=report,
    )
    timings.total = time.perf_counter() - t0_wall
    report.summary = _plan_summary(plan)
    return plan


def _truncated_prefix_routes(net, routes: list[tuple[int, list[dict]]], t_reopt: int):
    """Previous routes that reached their sink before t_reopt, cut at arrival.

    Arrival means the route never leaves that node again (routes may transit
    a sink node on the way elsewhere; those people are not delivered).
    People still under way belong to the new suffix routes instead.
    """
    kept = []
    for amount, steps in routes:
        for k, step in enumerate(steps):
            if step["t"] >= t_reopt:
                break
            if net.nodes[step["node"]].demand > 0 and all(
                s["node"] == step["node"] for s in steps[k + 1 :]
            ):
                kept.append((amount, steps[: k + 1]))
                break
    return kept


def _plan_summary(plan: EvacuationPlan) -> dict:
    return {
        "T_sol": plan.t_sol,
        "complete": plan.complete,
        "evacuated": plan.evacuated,
        "stranded": plan.stranded,
        "total_supply": plan.total_supply,
        "flows": len(plan.flows),
        "routes": len(plan.routes),
    }
