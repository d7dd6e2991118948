"""Command-line surface.

Subcommands: plan, update, export, stats, convert. Exit codes are a stable
contract: 0 success, 1 input error, 2 infeasible instance (e.g. every sink
overtaken at t=0). Set EVAC_LOG=debug|info|warn|error for verbosity.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys

from .errors import InfeasibleError, InputError
from .fire import scenario_from_dict
from .planner import UpdateRequest, plan_initial, plan_update
from .roadnet import contract, load_network
from .serialize import (
    export_geojson,
    read_json,
    read_plan,
    report_to_doc,
    write_json,
    write_plan,
)

log = logging.getLogger("evacflow")

_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}


def _setup_logging() -> None:
    level = _LEVELS.get(os.environ.get("EVAC_LOG", "warn").lower(), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(message)s")


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; our contract reserves 2 for
    # infeasibility, so bad flags must exit 1 instead
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(message)


def _build_parser() -> _Parser:
    p = _Parser(prog="evacflow", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("plan", help="compute an initial evacuation plan")
    sp.add_argument("--network", required=True)
    sp.add_argument("--fire", required=True)
    sp.add_argument("--tolerance", type=float, default=0.0, help="node contraction radius in meters")
    sp.add_argument("--tmax", type=int, required=True, help="worst-case horizon in instances")
    sp.add_argument("--out", required=True)
    sp.add_argument("--report", help="write a run report (timings, sizes) here")

    su = sub.add_parser("update", help="re-optimize an ongoing evacuation")
    su.add_argument("--network", required=True)
    su.add_argument("--plan", required=True, help="previous plan file")
    su.add_argument("--fire-update", required=True, help="revised scenario with t_fire")
    su.add_argument("--t-reopt", type=int, required=True)
    su.add_argument("--tmax", type=int, default=None)
    su.add_argument("--tolerance", type=float, default=0.0)
    su.add_argument("--out", required=True)
    su.add_argument("--report")

    se = sub.add_parser("export", help="per-instance GeoJSON of flows and fire")
    se.add_argument("--plan", required=True)
    se.add_argument("--network", required=True)
    se.add_argument("--format", choices=["geojson"], default="geojson")
    se.add_argument("--t-from", type=int, required=True)
    se.add_argument("--t-to", type=int, required=True)
    se.add_argument("--tolerance", type=float, default=0.0)
    se.add_argument("--out", required=True)

    st = sub.add_parser("stats", help="tabulate one or two run reports")
    st.add_argument("--report", required=True)
    st.add_argument("--compare", help="second report for a side-by-side table")

    sc = sub.add_parser("convert", help="node/edge CSV pair to a network JSON file")
    sc.add_argument("--nodes", required=True, help="CSV: id,lat,lon[,supply,demand]")
    sc.add_argument("--edges", required=True, help="CSV: u,v,name,speed_mps,lanes,oneway[,geometry]")
    sc.add_argument("--dt", type=int, default=60)
    sc.add_argument("--out", required=True)
    return p


def cmd_plan(args) -> int:
    net = contract(load_network(args.network), args.tolerance)
    scenario_doc = read_json(args.fire)
    scenario = scenario_from_dict(scenario_doc, net.origin)
    plan = plan_initial(net, scenario, args.tmax, scenario_doc=scenario_doc)
    write_plan(args.out, plan)
    log.info("plan: T_sol=%d evacuated=%d/%d complete=%s", plan.t_sol, plan.evacuated,
             plan.total_supply, plan.complete)
    if args.report:
        write_json(args.report, report_to_doc(plan.report))
    return 0


def cmd_update(args) -> int:
    net = contract(load_network(args.network), args.tolerance)
    prev = read_plan(args.plan)
    doc = read_json(args.fire_update)
    if "t_fire" not in doc:
        raise InputError("fire update file must carry 't_fire'")
    t_fire = int(doc["t_fire"])
    req = UpdateRequest(args.t_reopt, t_fire, scenario_from_dict(doc, net.origin))
    t_max = args.tmax if args.tmax is not None else prev.t_sol + prev.t_sol
    plan = plan_update(net, prev, req, t_max)
    write_plan(args.out, plan)
    log.info("update: T_sol=%d evacuated=%d/%d stranded=%d", plan.t_sol, plan.evacuated,
             plan.total_supply, plan.stranded)
    if args.report:
        write_json(args.report, report_to_doc(plan.report))
    return 0


def cmd_export(args) -> int:
    net = contract(load_network(args.network), args.tolerance)
    plan = read_plan(args.plan)
    fc = export_geojson(net, plan, args.t_from, args.t_to)
    write_json(args.out, fc)
    log.info("export: %d features -> %s", len(fc["features"]), args.out)
    return 0


_STAT_ROWS = [
    ("fire model s", lambda d: d["phase_seconds"]["fire_model"]),
    ("wten construction s", lambda d: d["phase_seconds"]["wten_construction"]),
    ("max flow s", lambda d: d["phase_seconds"]["max_flow"]),
    ("total s", lambda d: d["phase_seconds"]["total"]),
    ("nodes", lambda d: d["sizes"]["nodes"]),
    ("arcs", lambda d: d["sizes"]["arcs"]),
    ("wten nodes", lambda d: d["sizes"]["wten_nodes"]),
    ("wten arcs", lambda d: d["sizes"]["wten_arcs"]),
    ("horizons tried", lambda d: d["horizons_tried"]),
    ("T_sol", lambda d: d["plan"].get("T_sol", "")),
    ("evacuated", lambda d: d["plan"].get("evacuated", "")),
]


def cmd_stats(args) -> int:
    docs = [read_json(args.report)]
    headers = [args.report]
    if args.compare:
        docs.append(read_json(args.compare))
        headers.append(args.compare)
    try:
        cells = [[str(get(d)) for d in docs] for _, get in _STAT_ROWS]
    except (KeyError, TypeError) as exc:
        raise InputError(f"report file missing field: {exc}") from exc
    name_w = max(len(name) for name, _ in _STAT_ROWS)
    col_w = [max(len(h), max(len(row[i]) for row in cells)) for i, h in enumerate(headers)]
    lines = [" " * name_w + "  " + "  ".join(h.rjust(col_w[i]) for i, h in enumerate(headers))]
    for (name, _), row in zip(_STAT_ROWS, cells):
        lines.append(name.ljust(name_w) + "  " + "  ".join(c.rjust(col_w[i]) for i, c in enumerate(row)))
    print("\n".join(lines))
    return 0


def _read_csv(path: str) -> list[dict]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            return list(csv.DictReader(fh))
    except OSError as exc:
        raise InputError(f"cannot read {path!r}: {exc}") from exc


def cmd_convert(args) -> int:
    """Node/edge CSVs to the network JSON schema. Edge geometry is an
    optional 'lat lon;lat lon;...' column; endpoints fill in when absent."""
    nodes = []
    coords = {}
    for row in _read_csv(args.nodes):
        nid = row["id"].strip()
        coords[nid] = (float(row["lat"]), float(row["lon"]))
        node = {"id": nid, "lat": float(row["lat"]), "lon": float(row["lon"])}
        if row.get("supply"):
            node["supply"] = int(row["supply"])
        if row.get("demand"):
            node["demand"] = int(row["demand"])
        nodes.append(node)
    edges = []
    for row in _read_csv(args.edges):
        u, v = row["u"].strip(), row["v"].strip()
        if u not in coords or v not in coords:
            raise InputError(f"missing node: edge {u}->{v}")
        if row.get("geometry"):
            geom = [[float(a) for a in pt.split()] for pt in row["geometry"].split(";")]
        else:
            geom = [list(coords[u]), list(coords[v])]
        edges.append(
            {
                "u": u,
                "v": v,
                "name": row.get("name", ""),
                "speed_mps": float(row["speed_mps"]),
                "lanes": int(row.get("lanes") or 1),
                "oneway": (row.get("oneway") or "").strip().lower() in ("1", "true", "yes"),
                "geometry": geom,
            }
        )
    write_json(args.out, {"dt_seconds": args.dt, "nodes": nodes, "edges": edges})
    return 0


_COMMANDS = {
    "plan": cmd_plan,
    "update": cmd_update,
    "export": cmd_export,
    "stats": cmd_stats,
    "convert": cmd_convert,
}


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
