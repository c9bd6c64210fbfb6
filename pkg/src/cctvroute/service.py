"""HTTP routing service.

Serves routes, the camera dataset, health, and dataset reloads over a
read-only snapshot. A snapshot prebuilds one coverage graph per configured
radius; reloads build a fresh snapshot off to the side and swap it in
atomically, so in-flight requests always see a consistent dataset.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Mapping, Sequence

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .cameras import (
    Camera,
    CoverageConfig,
    SurveillanceTask,
    camera_properties,
    coverage_radius_m,
    load_cameras,
)
from .geo import GeoPoint, ProjectionRangeError
from .graph import CoverageGraph, DEFAULT_SAFETY_BETA, Mode, build_graph
from .osm import parse_osm
from .routing import (
    DEFAULT_COMPLETE_GAP_MAX_M,
    DEFAULT_SNAP_GAP_MAX_M,
    RouteRequest,
    RouteResult,
    RouteStatus,
    route,
)

DEFAULT_RADII: tuple[float, ...] = (10.0, 15.0, 25.0)


@dataclass(frozen=True)
class ServiceConfig:
    radii: tuple[float, ...] = DEFAULT_RADII
    task: SurveillanceTask = SurveillanceTask.RECOGNITION
    beta: float = DEFAULT_SAFETY_BETA
    snap_gap_max_m: float = DEFAULT_SNAP_GAP_MAX_M
    complete_gap_max_m: float = DEFAULT_COMPLETE_GAP_MAX_M

    def __post_init__(self):
        if not self.radii:
            raise ValueError("service needs at least one radius")


@dataclass(frozen=True)
class DatasetSnapshot:
    """Immutable dataset state: one prebuilt graph per radius."""

    snapshot_id: str
    build_timestamp: str
    graphs: Mapping[float, CoverageGraph]
    cameras: tuple[Camera, ...]


_build_seq = 0
_build_seq_lock = threading.Lock()


def build_snapshot(osm_data: bytes, camera_data: bytes, config: ServiceConfig) -> DatasetSnapshot:
    global _build_seq
    net = parse_osm(osm_data)
    cams = load_cameras(camera_data)
    graphs = {
        float(r): build_graph(net, cams, CoverageConfig(task=config.task, global_radius_m=float(r)))
        for r in config.radii
    }
    digest = hashlib.sha256(osm_data + camera_data).hexdigest()[:12]
    with _build_seq_lock:
        _build_seq += 1
        seq = _build_seq
    return DatasetSnapshot(
        snapshot_id=f"{seq}-{digest}",
        build_timestamp=datetime.now(timezone.utc).isoformat(),
        graphs=graphs,
        cameras=tuple(cams),
    )


def build_snapshot_from_paths(osm_path: str | Path, cameras_path: str | Path,
                              config: ServiceConfig) -> DatasetSnapshot:
    return build_snapshot(Path(osm_path).read_bytes(), Path(cameras_path).read_bytes(), config)


class _BadRequest(ValueError):
    def __init__(self, message: str, extra: dict[str, Any] | None = None):
        super().__init__(message)
        self.extra = extra or {}


def _parse_point(body: Mapping[str, Any], name: str) -> GeoPoint:
    raw = body.get(name)
    if not isinstance(raw, dict) or "lat" not in raw or "lon" not in raw:
        raise _BadRequest(f"{name} must be an object with lat and lon")
    lat, lon = raw["lat"], raw["lon"]
    for v in (lat, lon):
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise _BadRequest(f"{name}.lat and {name}.lon must be numbers")
    try:
        return GeoPoint(float(lat), float(lon))
    except ValueError as exc:
        raise _BadRequest(f"{name}: {exc}")


def _parse_route_body(body: Any, snapshot: DatasetSnapshot,
                      config: ServiceConfig) -> tuple[RouteRequest, CoverageGraph, float]:
    if not isinstance(body, dict):
        raise _BadRequest("request body must be a JSON object")
    origin = _parse_point(body, "origin")
    destination = _parse_point(body, "destination")

    via_raw = body.get("via", [])
    if not isinstance(via_raw, list):
        raise _BadRequest("via must be a list of points")
    via = tuple(_parse_point({"via": v}, "via") for v in via_raw)

    mode_raw = body.get("mode")
    try:
        mode = Mode(mode_raw)
    except ValueError:
        raise _BadRequest(f"mode must be one of privacy, safety, baseline; got {mode_raw!r}")

    if "radius_m" not in body:
        raise _BadRequest("radius_m missing")
    radius_raw = body["radius_m"]
    if not isinstance(radius_raw, (int, float)) or isinstance(radius_raw, bool):
        raise _BadRequest("radius_m must be a number")
    radius = float(radius_raw)
    if radius not in snapshot.graphs:
        raise _BadRequest(
            f"radius_m {radius:g} not prebuilt",
            {"available_radii": sorted(snapshot.graphs)},
        )

    beta = body.get("beta", config.beta)
    if not isinstance(beta, (int, float)) or isinstance(beta, bool):
        raise _BadRequest("beta must be a number")
    snap_gap = body.get("snap_gap_max_m", config.snap_gap_max_m)
    if not isinstance(snap_gap, (int, float)) or isinstance(snap_gap, bool):
        raise _BadRequest("snap_gap_max_m must be a number")

    try:
        req = RouteRequest(
            origin=origin, destination=destination, via=via, mode=mode,
            beta=float(beta), snap_gap_max_m=float(snap_gap),
            complete_gap_max_m=config.complete_gap_max_m,
        )
    except ValueError as exc:
        raise _BadRequest(str(exc))
    return req, snapshot.graphs[radius], radius


def _polyline_feature(res: RouteResult, mode: Mode, radius: float) -> dict[str, Any] | None:
    if not res.polyline:
        return None
    coords = [[p.lon, p.lat] for p in res.polyline]
    geometry: dict[str, Any]
    if len(coords) == 1:
        geometry = {"type": "Point", "coordinates": coords[0]}
    else:
        geometry = {"type": "LineString", "coordinates": coords}
    return {
        "type": "Feature",
        "geometry": geometry,
        "properties": {"mode": mode.value, "radius_m": radius},
    }


def route_response(res: RouteResult, mode: Mode, radius: float) -> dict[str, Any]:
    return {
        "status": res.status.value,
        "mode": mode.value,
        "radius_m": radius,
        "length_m": res.length_m,
        "exposure_m": res.exposure_m,
        "gap_origin_m": res.gap_origin_m,
        "gap_destination_m": res.gap_destination_m,
        "overhead_vs_baseline": res.overhead_vs_baseline,
        "polyline": _polyline_feature(res, mode, radius),
    }


def create_app(config: ServiceConfig = ServiceConfig(),
               snapshot: DatasetSnapshot | None = None) -> FastAPI:
    """Build the service app. Without a snapshot every data endpoint
    answers 503 until a successful /reload."""
    app = FastAPI(title="cctvroute", version="0.1.0")
    # The map client is a static bundle and usually runs on another origin.
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["GET", "POST"],
        allow_headers=["content-type"],
    )
    app.state.config = config
    app.state.snapshot = snapshot
    app.state.reload_lock = threading.Lock()

    def current() -> DatasetSnapshot | None:
        return app.state.snapshot

    def no_dataset() -> JSONResponse:
        return JSONResponse(status_code=503, content={"error": "no dataset loaded"})

    @app.get("/health")
    def health():
        snap = current()
        if snap is None:
            return no_dataset()
        return {
            "status": "ok",
            "snapshot_id": snap.snapshot_id,
            "build_timestamp": snap.build_timestamp,
            "radii": sorted(snap.graphs),
        }

    @app.post("/route")
    async def route_endpoint(request: Request):
        snap = current()
        if snap is None:
            return no_dataset()
        try:
            body = json.loads(await request.body())
        except json.JSONDecodeError as exc:
            return JSONResponse(status_code=400, content={"error": f"invalid JSON: {exc}"})
        try:
            req, graph, radius = _parse_route_body(body, snap, app.state.config)
            res = route(req, graph)
        except _BadRequest as exc:
            return JSONResponse(status_code=400, content={"error": str(exc), **exc.extra})
        except (ProjectionRangeError, ValueError) as exc:
            return JSONResponse(status_code=400, content={"error": str(exc)})
        # NoRoute is a valid answer, not an error: still 200.
        return JSONResponse(content=route_response(res, req.mode, radius))

    @app.get("/cameras")
    def cameras_endpoint(request: Request):
        snap = current()
        if snap is None:
            return no_dataset()
        bbox_raw = request.query_params.get("bbox")
        if bbox_raw is None:
            return JSONResponse(status_code=400, content={"error": "bbox query parameter missing"})
        parts = bbox_raw.split(",")
        try:
            west, south, east, north = (float(p) for p in parts)
        except ValueError:
            return JSONResponse(status_code=400, content={
                "error": "bbox must be four numbers: minlon,minlat,maxlon,maxlat"})
        if west > east or south > north:
            return JSONResponse(status_code=400, content={"error": "bbox is inverted"})
        task = app.state.config.task
        feats = []
        for c in snap.cameras:
            if not (west <= c.pos.lon <= east and south <= c.pos.lat <= north):
                continue
            props = camera_properties(c)
            props["effective_radius_m"] = {
                f"{r:g}": coverage_radius_m(c, CoverageConfig(task=task, global_radius_m=r))
                for r in sorted(snap.graphs)
            }
            feats.append({
                "type": "Feature",
                "geometry": {"type": "Point", "coordinates": [c.pos.lon, c.pos.lat]},
                "properties": props,
            })
        return JSONResponse(content={"type": "FeatureCollection", "features": feats})

    @app.post("/reload")
    async def reload_endpoint(request: Request):
        try:
            body = json.loads(await request.body())
        except json.JSONDecodeError as exc:
            return JSONResponse(status_code=400, content={"error": f"invalid JSON: {exc}"})
        if not isinstance(body, dict):
            return JSONResponse(status_code=400, content={"error": "request body must be a JSON object"})
        osm_path = body.get("osm_path")
        cameras_path = body.get("cameras_path")
        if not isinstance(osm_path, str) or not isinstance(cameras_path, str):
            return JSONResponse(status_code=400, content={
                "error": "osm_path and cameras_path must be strings"})
        # Build outside the request's snapshot; swap only on success so a
        # failed reload never disturbs what is being served.
        with app.state.reload_lock:
            try:
                snap = build_snapshot_from_paths(osm_path, cameras_path, app.state.config)
            except Exception as exc:
                return JSONResponse(status_code=500, content={"error": str(exc)})
            app.state.snapshot = snap
        return {
            "snapshot_id": snap.snapshot_id,
            "build_timestamp": snap.build_timestamp,
            "radii": sorted(snap.graphs),
        }

    return app
