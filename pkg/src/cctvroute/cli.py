"""Command-line interface: ingest, route, experiment, serve.

Exit codes: 0 success, 2 usage or input problems, 3 when a requested route
does not exist under the given constraints.
"""

from __future__ import annotations

import argparse
import json
import socket
import sys
from pathlib import Path

from .cameras import (
    Camera,
    CameraConfigError,
    CameraFormatError,
    CoverageConfig,
    SurveillanceTask,
    load_cameras,
)
from .experiment import (
    ExperimentSpec,
    SpecFormatError,
    bundled_jyvaskyla_spec,
    cell_geojson,
    load_spec,
    render_table,
    report_to_dict,
    run_matrix,
)
from .geo import GeoPoint
from .graph import DEFAULT_SAFETY_BETA, Mode, build_graph
from .osm import OsmError, PEDESTRIAN_HIGHWAYS, network_stats, parse_osm
from .routing import (
    DEFAULT_COMPLETE_GAP_MAX_M,
    DEFAULT_SNAP_GAP_MAX_M,
    RouteRequest,
    RouteStatus,
    route,
)
from .service import ServiceConfig, build_snapshot, create_app

DEFAULT_RADII = (10.0, 15.0, 25.0)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NO_ROUTE = 3


def _parse_latlon(text: str) -> GeoPoint:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"expected LAT,LON, got {text!r}")
    return GeoPoint(float(parts[0]), float(parts[1]))


def _parse_listen(text: str) -> tuple[str, int]:
    host, sep, port = text.rpartition(":")
    if not sep or not host:
        raise ValueError(f"expected HOST:PORT, got {text!r}")
    return host, int(port)


def _highway_set(arg: str | None) -> frozenset[str]:
    if arg is None:
        return PEDESTRIAN_HIGHWAYS
    classes = frozenset(c.strip() for c in arg.split(",") if c.strip())
    if not classes:
        raise ValueError("empty highway class list")
    return classes


def _load_inputs(args) -> tuple:
    net = parse_osm(Path(args.osm).read_bytes(), _highway_set(args.highway_classes))
    cams = load_cameras(Path(args.cameras).read_bytes())
    return net, cams


def _fmt(x: float) -> str:
    # "400" rather than "400.0", but keep real decimals.
    r = round(x, 4)
    return str(int(r)) if r == int(r) else str(r)


def cmd_ingest(args) -> int:
    net, cams = _load_inputs(args)
    stats = network_stats(net)
    print(f"nodes {stats.node_count}  ways {stats.way_count}  "
          f"length_m {stats.total_length_m:.1f}  cameras {len(cams)}")
    radii = args.radius or list(DEFAULT_RADII)
    for r in radii:
        g = build_graph(net, cams, CoverageConfig(task=args.task, global_radius_m=r))
        print(f"radius {r:g}: graph nodes {g.node_count} edges {g.edge_count} "
              f"covered_m {g.covered_length_m():.1f} clear_m {g.clear_length_m():.1f}")
        if args.dump_graph:
            path = Path(args.dump_graph)
            if len(radii) > 1:
                path = path.with_name(f"{path.stem}_r{r:g}{path.suffix}")
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(json.dumps(g.to_geojson()))
            print(f"wrote {path}")
    return EXIT_OK


def cmd_route(args) -> int:
    net, cams = _load_inputs(args)
    g = build_graph(net, cams, CoverageConfig(task=args.task, global_radius_m=args.radius))
    req = RouteRequest(
        origin=_parse_latlon(getattr(args, "from")),
        destination=_parse_latlon(args.to),
        via=tuple(_parse_latlon(v) for v in args.via or ()),
        mode=Mode(args.mode),
        beta=args.beta,
        snap_gap_max_m=args.snap_gap_max,
        complete_gap_max_m=args.complete_gap_max,
    )
    res = route(req, g)
    if res.status is RouteStatus.NO_ROUTE:
        print("no_route")
        return EXIT_NO_ROUTE
    overhead = "none" if res.overhead_vs_baseline is None else str(round(res.overhead_vs_baseline, 4))
    print(f"{res.status.value} {_fmt(res.length_m)} {_fmt(res.exposure_m)} {overhead}")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    coords = [[p.lon, p.lat] for p in res.polyline]
    geometry = ({"type": "Point", "coordinates": coords[0]} if len(coords) == 1
                else {"type": "LineString", "coordinates": coords})
    feature = {
        "type": "Feature",
        "geometry": geometry,
        "properties": {
            "mode": req.mode.value,
            "radius_m": args.radius,
            "status": res.status.value,
            "length_m": res.length_m,
            "exposure_m": res.exposure_m,
            "gap_origin_m": res.gap_origin_m,
            "gap_destination_m": res.gap_destination_m,
        },
    }
    (out / "route.geojson").write_text(json.dumps(feature))
    return EXIT_OK


def cmd_experiment(args) -> int:
    net, cams = _load_inputs(args)
    spec = load_spec(Path(args.spec).read_bytes()) if args.spec else bundled_jyvaskyla_spec()
    report = run_matrix(
        spec, net, cams, task=args.task, beta=args.beta,
        snap_gap_max_m=args.snap_gap_max, complete_gap_max_m=args.complete_gap_max,
    )
    text = render_table(report)
    print(text)
    out = Path(args.out)
    routes_dir = out / "routes"
    routes_dir.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(json.dumps(report_to_dict(report), indent=2))
    (out / "report.txt").write_text(text + "\n")
    for pair in spec.pairs:
        for mode, radius in spec.modes:
            feat = cell_geojson(report, pair.name, mode, radius)
            if feat is None:
                continue
            name = f"route_{pair.name}_{mode.value}_{radius:g}m.geojson"
            (routes_dir / name).write_text(json.dumps(feat))
    return EXIT_OK


def cmd_serve(args) -> int:
    host, port = _parse_listen(args.listen)
    # Probe the port up front so a busy port is a usage error, not a
    # uvicorn stack trace.
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((host, port))
    except OSError as exc:
        print(f"error: cannot listen on {args.listen}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        probe.close()

    config = ServiceConfig(
        radii=tuple(args.radii or DEFAULT_RADII), task=args.task, beta=args.beta,
        snap_gap_max_m=args.snap_gap_max, complete_gap_max_m=args.complete_gap_max,
    )
    snapshot = build_snapshot(Path(args.osm).read_bytes(), Path(args.cameras).read_bytes(), config)
    app = create_app(config, snapshot)
    import uvicorn
    uvicorn.run(app, host=host, port=port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cctvroute",
        description="CCTV-aware pedestrian routing over OSM data",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_dataset_args(p):
        p.add_argument("--osm", required=True, help="OSM XML file")
        p.add_argument("--cameras", required=True, help="camera GeoJSON file")
        p.add_argument("--task", type=SurveillanceTask, default=SurveillanceTask.RECOGNITION,
                       choices=list(SurveillanceTask),
                       metavar="TASK", help="surveillance task for derived radii (default recognition)")
        p.add_argument("--highway-classes", default=None,
                       help="comma-separated highway classes to keep (default: built-in pedestrian set)")

    p_ingest = sub.add_parser("ingest", help="parse a dataset and report graph statistics")
    add_dataset_args(p_ingest)
    p_ingest.add_argument("--radius", type=float, action="append",
                          help="coverage radius in meters (repeatable; default 10 15 25)")
    p_ingest.add_argument("--dump-graph", default=None,
                          help="write the split graph as GeoJSON lines to this path")
    p_ingest.set_defaults(func=cmd_ingest)

    p_route = sub.add_parser("route", help="compute one route")
    add_dataset_args(p_route)
    p_route.add_argument("--from", required=True, metavar="LAT,LON")
    p_route.add_argument("--to", required=True, metavar="LAT,LON")
    p_route.add_argument("--via", action="append", metavar="LAT,LON")
    p_route.add_argument("--mode", default="privacy",
                         choices=[m.value for m in Mode])
    p_route.add_argument("--radius", type=float, default=10.0,
                         help="coverage radius in meters (default 10)")
    p_route.add_argument("--beta", type=float, default=DEFAULT_SAFETY_BETA)
    p_route.add_argument("--snap-gap-max", type=float, default=DEFAULT_SNAP_GAP_MAX_M)
    p_route.add_argument("--complete-gap-max", type=float, default=DEFAULT_COMPLETE_GAP_MAX_M)
    p_route.add_argument("--out", default="./out", help="output directory (default ./out)")
    p_route.set_defaults(func=cmd_route)

    p_exp = sub.add_parser("experiment", help="run an OD-pair matrix and summarize")
    add_dataset_args(p_exp)
    p_exp.add_argument("--spec", default=None,
                       help="experiment spec JSON (default: bundled Jyvaskyla pairs)")
    p_exp.add_argument("--beta", type=float, default=DEFAULT_SAFETY_BETA)
    p_exp.add_argument("--snap-gap-max", type=float, default=DEFAULT_SNAP_GAP_MAX_M)
    p_exp.add_argument("--complete-gap-max", type=float, default=DEFAULT_COMPLETE_GAP_MAX_M)
    p_exp.add_argument("--out", default="./out", help="output directory (default ./out)")
    p_exp.set_defaults(func=cmd_experiment)

    p_serve = sub.add_parser("serve", help="serve routing over HTTP")
    add_dataset_args(p_serve)
    p_serve.add_argument("--listen", default="127.0.0.1:8000", metavar="HOST:PORT")
    p_serve.add_argument("--radii", type=float, nargs="+",
                         help="prebuilt coverage radii (default 10 15 25)")
    p_serve.add_argument("--beta", type=float, default=DEFAULT_SAFETY_BETA)
    p_serve.add_argument("--snap-gap-max", type=float, default=DEFAULT_SNAP_GAP_MAX_M)
    p_serve.add_argument("--complete-gap-max", type=float, default=DEFAULT_COMPLETE_GAP_MAX_M)
    p_serve.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OsmError, CameraFormatError, CameraConfigError, SpecFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
