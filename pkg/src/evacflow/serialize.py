"""Plan/report files and GeoJSON export.

All files are UTF-8 JSON written with sorted keys and compact separators so
identical content always produces identical bytes (golden-file friendly).
Plan files carry only integers plus the embedded scenario document; floats
appear only in GeoJSON coordinates, pre-rounded to 1e-7 degrees.
"""

from __future__ import annotations

import json
import math

from .errors import InputError
from .fire import build_cache, fire_set_at, scenario_from_dict
from .geometry import unproject
from .planner import EvacuationPlan, FlowEntry, RunReport
from .roadnet import DynamicNetwork
from .wten import scaled_capacity


def canonical_dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def write_json(path: str, doc) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_dumps(doc))
        fh.write("\n")


def read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path!r}: {exc}") from exc


# --- plan files ---------------------------------------------------------------


def plan_to_doc(plan: EvacuationPlan) -> dict:
    return {
        "T_sol": plan.t_sol,
        "dt_seconds": plan.dt_seconds,
        "complete": plan.complete,
        "evacuated": plan.evacuated,
        "stranded": plan.stranded,
        "total_supply": plan.total_supply,
        "t_reopt": plan.t_reopt,
        "scenario": plan.scenario_doc,
        "fingerprint": plan.fingerprint,
        "flows": [
            {
                "u": e.u,
                "v": e.v,
                "base_edge": list(e.base_edge),
                "depart_t": e.depart_t,
                "arrive_t": e.arrive_t,
                "flow": e.flow,
                "kind": e.kind,
            }
            for e in plan.flows
        ],
        "routes": [{"amount": amount, "steps": steps} for amount, steps in plan.routes],
        "stuck": {str(lab): amt for lab, amt in sorted(plan.stuck.items())},
    }


def plan_from_doc(doc: dict) -> EvacuationPlan:
    try:
        flows = [
            FlowEntry(
                u=int(f["u"]),
                v=int(f["v"]),
                base_edge=(str(f["base_edge"][0]), str(f["base_edge"][1])),
                depart_t=int(f["depart_t"]),
                arrive_t=int(f["arrive_t"]),
                flow=int(f["flow"]),
                kind=str(f["kind"]),
            )
            for f in doc["flows"]
        ]
        return EvacuationPlan(
            t_sol=int(doc["T_sol"]),
            dt_seconds=int(doc["dt_seconds"]),
            complete=bool(doc["complete"]),
            evacuated=int(doc["evacuated"]),
            stranded=int(doc["stranded"]),
            total_supply=int(doc["total_supply"]),
            t_reopt=int(doc.get("t_reopt", 0)),
            scenario_doc=doc["scenario"],
            fingerprint=str(doc["fingerprint"]),
            flows=flows,
            routes=[(int(r["amount"]), list(r["steps"])) for r in doc["routes"]],
            stuck={int(k): int(v) for k, v in doc.get("stuck", {}).items()},
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed plan document: {exc}") from exc


def write_plan(path: str, plan: EvacuationPlan) -> None:
    write_json(path, plan_to_doc(plan))


def read_plan(path: str) -> EvacuationPlan:
    return plan_from_doc(read_json(path))


# --- run reports --------------------------------------------------------------


def report_to_doc(report: RunReport) -> dict:
    t = report.timings
    return {
        "phase_seconds": {
            "fire_model": round(t.fire_model, 6),
            "wten_construction": round(t.wten_construction, 6),
            "max_flow": round(t.max_flow, 6),
            "total": round(t.total, 6),
        },
        "sizes": {
            "nodes": report.base_nodes,
            "arcs": report.base_arcs,
            "wten_nodes": report.wten_nodes,
            "wten_arcs": report.wten_arcs,
        },
        "horizons_tried": report.horizons_tried,
        "plan": report.summary,
    }


# --- GeoJSON export -----------------------------------------------------------


def _round_ll(lat: float, lon: float) -> list[float]:
    # GeoJSON positions are [lon, lat]
    return [round(lon, 7), round(lat, 7)]


def _edge_coords(net: DynamicNetwork, u: str, v: str) -> list[list[float]]:
    arc = net.arcs[(u, v)]
    return [_round_ll(*unproject(p, net.origin)) for p in arc.geometry]


def _fireset_features(net: DynamicNetwork, fset, t: int) -> list[dict]:
    feats = []
    for c in fset.circles:
        ring = []
        for k in range(64):
            a = 2 * math.pi * k / 64
            p = type(c.center)(c.center.x + c.radius * math.cos(a), c.center.y + c.radius * math.sin(a))
            ring.append(_round_ll(*unproject(p, net.origin)))
        ring.append(ring[0])
        feats.append(
            {
                "type": "Feature",
                "geometry": {"type": "Polygon", "coordinates": [ring]},
                "properties": {"kind": "fire", "t": t},
            }
        )
    for poly in fset.polygons:
        ring = [_round_ll(*unproject(p, net.origin)) for p in poly]
        ring.append(ring[0])
        feats.append(
            {
                "type": "Feature",
                "geometry": {"type": "Polygon", "coordinates": [ring]},
                "properties": {"kind": "fire", "t": t},
            }
        )
    return feats


def export_geojson(
    net: DynamicNetwork,
    plan: EvacuationPlan,
    t_from: int,
    t_to: int,
) -> dict:
    """One FeatureCollection for the instance range [t_from..t_to].

    Every base road becomes a LineString feature with its flow departing
    within the range, the capacity at t_from (the minimum over the range when
    it spans several instances), and a used flag. Fire footprints are added
    as polygon features, one set per instance.
    """
    if not (0 <= t_from <= t_to <= plan.t_sol):
        raise InputError(f"instance range [{t_from}..{t_to}] outside the plan horizon [0..{plan.t_sol}]")
    scenario = scenario_from_dict(plan.scenario_doc, net.origin)
    cache = build_cache(net, scenario, t_to)

    flow_by_edge: dict[tuple[str, str], int] = {}
    for e in plan.flows:
        if e.kind == "movement" and t_from <= e.depart_t <= t_to:
            flow_by_edge[e.base_edge] = flow_by_edge.get(e.base_edge, 0) + e.flow

    feats = []
    for (u, v), arc in sorted(net.arcs.items()):
        caps = [
            scaled_capacity(arc.capacity, cache.arc_dist[t][(u, v)], arc.travel_time)
            for t in range(t_from, t_to + 1)
        ]
        flow = flow_by_edge.get((u, v), 0)
        feats.append(
            {
                "type": "Feature",
                "geometry": {"type": "LineString", "coordinates": _edge_coords(net, u, v)},
                "properties": {
                    "u": u,
                    "v": v,
                    "name": arc.road_name,
                    "flow": flow,
                    "capacity_at_t": min(caps),
                    "used": flow > 0,
                },
            }
        )
    for t in range(t_from, t_to + 1):
        fset = fire_set_at(scenario, t)
        if not fset.is_empty:
            feats.extend(_fireset_features(net, fset, t))
    return {"type": "FeatureCollection", "features": feats}
