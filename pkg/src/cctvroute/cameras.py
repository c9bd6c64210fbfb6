"""Camera dataset model and face-recognition coverage radii.

Coverage follows the EN 62676-4 pixel-density tiers: a camera supports a
surveillance task out to the distance where its horizontal resolution still
delivers the task's required pixels-per-meter. Datasets travel as GeoJSON
FeatureCollections of Point features.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence, Union

from .geo import GeoPoint, LocalXY


class SurveillanceTask(enum.Enum):
    IDENTIFICATION = "identification"
    RECOGNITION = "recognition"
    OBSERVATION = "observation"
    DETECTION = "detection"
    MONITORING = "monitoring"


# Required pixels per meter at the subject, per EN 62676-4.
TASK_PPM: dict[SurveillanceTask, int] = {
    SurveillanceTask.IDENTIFICATION: 250,
    SurveillanceTask.RECOGNITION: 125,
    SurveillanceTask.OBSERVATION: 62,
    SurveillanceTask.DETECTION: 25,
    SurveillanceTask.MONITORING: 12,
}


def task_ppm(task: SurveillanceTask) -> int:
    return TASK_PPM[task]


class CameraFormatError(ValueError):
    """Camera dataset violates the interchange schema."""


class CameraConfigError(ValueError):
    """No coverage radius is derivable for a camera under a config."""


@dataclass(frozen=True, slots=True)
class OmniFov:
    """Full 360-degree field of view."""


@dataclass(frozen=True, slots=True)
class SectorFov:
    """Sector field of view.

    bearing_deg is the compass bearing of the sector center (0 = north,
    90 = east), angle_deg the full opening angle.
    """

    bearing_deg: float
    angle_deg: float

    def __post_init__(self):
        if not (0.0 <= self.bearing_deg < 360.0):
            raise ValueError(f"bearing_deg must be in [0, 360), got {self.bearing_deg}")
        if not (0.0 < self.angle_deg < 360.0):
            raise ValueError(f"angle_deg must be in (0, 360), got {self.angle_deg}")


FovSpec = Union[OmniFov, SectorFov]


@dataclass(frozen=True, slots=True)
class OpticsSpec:
    h_res_px: int
    hfov_deg: float

    def __post_init__(self):
        if self.h_res_px <= 0:
            raise ValueError(f"h_res_px must be positive, got {self.h_res_px}")
        if not (0.0 < self.hfov_deg < 180.0):
            raise ValueError(f"hfov_deg must be in (0, 180), got {self.hfov_deg}")


@dataclass(frozen=True)
class Camera:
    id: str
    pos: GeoPoint
    fov: FovSpec = OmniFov()
    radius_override_m: Mapping[SurveillanceTask, float] | None = None
    optics: OpticsSpec | None = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("camera id must be non-empty")
        if self.radius_override_m is not None:
            for t, r in self.radius_override_m.items():
                if r <= 0:
                    raise ValueError(f"camera {self.id!r}: radius for {t.value} must be positive")


@dataclass(frozen=True, slots=True)
class CoverageConfig:
    """Which task radii derive from, plus an optional fixed-radius override."""

    task: SurveillanceTask = SurveillanceTask.RECOGNITION
    global_radius_m: float | None = None

    def __post_init__(self):
        if self.global_radius_m is not None and not (0.0 < self.global_radius_m <= 500.0):
            raise ValueError(f"global_radius_m must be in (0, 500], got {self.global_radius_m}")


def optics_radius_m(optics: OpticsSpec, task: SurveillanceTask) -> float:
    """Distance at which the optics still deliver the task's pixel density.

    d = h_res_px / (2 * ppm * tan(hfov / 2)).
    """
    return optics.h_res_px / (2.0 * task_ppm(task) * math.tan(math.radians(optics.hfov_deg) / 2.0))


def coverage_radius_m(cam: Camera, cfg: CoverageConfig) -> float:
    """Effective coverage radius under cfg.

    Precedence: cfg.global_radius_m, then the camera's per-task override,
    then the optics formula. Raises CameraConfigError naming the camera when
    none applies.
    """
    if cfg.global_radius_m is not None:
        return cfg.global_radius_m
    if cam.radius_override_m is not None and cfg.task in cam.radius_override_m:
        return cam.radius_override_m[cfg.task]
    if cam.optics is not None:
        return optics_radius_m(cam.optics, cfg.task)
    raise CameraConfigError(
        f"camera {cam.id!r}: no radius for task {cfg.task.value!r} "
        "(no global radius, no override, no optics)"
    )


def covers(cam: Camera, p: LocalXY, cam_xy: LocalXY, radius_m: float) -> bool:
    """True when p falls inside the camera's coverage region.

    Within radius and, for sector cameras, within half the opening angle of
    the sector bearing (inclusive at exactly the half-angle). A point at the
    camera position itself is covered regardless of FoV.
    """
    dx = p.x - cam_xy.x
    dy = p.y - cam_xy.y
    d2 = dx * dx + dy * dy
    if d2 > radius_m * radius_m:
        return False
    if isinstance(cam.fov, OmniFov):
        return True
    if d2 == 0.0:
        return True
    brg = math.degrees(math.atan2(dx, dy)) % 360.0
    diff = abs((brg - cam.fov.bearing_deg + 180.0) % 360.0 - 180.0)
    return diff <= cam.fov.angle_deg / 2.0


def _fail(i: int, msg: str):
    raise CameraFormatError(f"feature {i}: {msg}")


def _parse_fov(i: int, raw: Any) -> FovSpec:
    if raw is None or raw == "omni":
        return OmniFov()
    if not isinstance(raw, dict):
        _fail(i, f"fov must be \"omni\" or an object, got {raw!r}")
    for key in ("bearing_deg", "angle_deg"):
        if key not in raw:
            _fail(i, f"fov.{key} missing")
        if not isinstance(raw[key], (int, float)) or isinstance(raw[key], bool):
            _fail(i, f"fov.{key} must be a number")
    try:
        return SectorFov(float(raw["bearing_deg"]), float(raw["angle_deg"]))
    except ValueError as exc:
        _fail(i, f"fov: {exc}")


def _parse_radius_table(i: int, raw: Any) -> dict[SurveillanceTask, float]:
    if not isinstance(raw, dict):
        _fail(i, "radius_m must be an object mapping task names to meters")
    table: dict[SurveillanceTask, float] = {}
    for name, val in raw.items():
        try:
            t = SurveillanceTask(name)
        except ValueError:
            _fail(i, f"radius_m: unknown task {name!r}")
        if not isinstance(val, (int, float)) or isinstance(val, bool) or val <= 0:
            _fail(i, f"radius_m.{name} must be a positive number")
        table[t] = float(val)
    return table


def _parse_optics(i: int, raw: Any) -> OpticsSpec:
    if not isinstance(raw, dict):
        _fail(i, "optics must be an object")
    for key in ("h_res_px", "hfov_deg"):
        if key not in raw:
            _fail(i, f"optics.{key} missing")
    if not isinstance(raw["h_res_px"], int) or isinstance(raw["h_res_px"], bool):
        _fail(i, "optics.h_res_px must be an integer")
    if not isinstance(raw["hfov_deg"], (int, float)) or isinstance(raw["hfov_deg"], bool):
        _fail(i, "optics.hfov_deg must be a number")
    try:
        return OpticsSpec(raw["h_res_px"], float(raw["hfov_deg"]))
    except ValueError as exc:
        _fail(i, f"optics: {exc}")


def load_cameras(data: bytes | str) -> list[Camera]:
    """Load cameras from a GeoJSON FeatureCollection of Point features.

    Schema problems raise CameraFormatError naming the offending feature
    index and field. Camera ids must be unique.
    """
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise CameraFormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("type") != "FeatureCollection":
        raise CameraFormatError("top-level object must be a GeoJSON FeatureCollection")
    feats = doc.get("features")
    if not isinstance(feats, list):
        raise CameraFormatError("FeatureCollection.features must be a list")

    cams: list[Camera] = []
    seen: set[str] = set()
    for i, feat in enumerate(feats):
        if not isinstance(feat, dict) or feat.get("type") != "Feature":
            _fail(i, "not a GeoJSON Feature")
        geom = feat.get("geometry")
        if not isinstance(geom, dict) or geom.get("type") != "Point":
            _fail(i, "geometry must be a Point")
        coords = geom.get("coordinates")
        if (not isinstance(coords, list) or len(coords) != 2
                or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in coords)):
            _fail(i, "geometry.coordinates must be [lon, lat]")
        try:
            pos = GeoPoint(float(coords[1]), float(coords[0]))
        except ValueError as exc:
            _fail(i, f"geometry.coordinates: {exc}")
        props = feat.get("properties")
        if not isinstance(props, dict):
            _fail(i, "properties missing")
        cam_id = props.get("id")
        if not isinstance(cam_id, str) or not cam_id:
            _fail(i, "properties.id must be a non-empty string")
        if cam_id in seen:
            _fail(i, f"duplicate camera id {cam_id!r}")
        seen.add(cam_id)
        fov = _parse_fov(i, props.get("fov"))
        radius = _parse_radius_table(i, props["radius_m"]) if "radius_m" in props else None
        optics = _parse_optics(i, props["optics"]) if "optics" in props else None
        cams.append(Camera(cam_id, pos, fov, radius, optics))
    return cams


def camera_properties(cam: Camera) -> dict[str, Any]:
    """Interchange properties for one camera (sans any derived values)."""
    props: dict[str, Any] = {"id": cam.id}
    if isinstance(cam.fov, SectorFov):
        props["fov"] = {"bearing_deg": cam.fov.bearing_deg, "angle_deg": cam.fov.angle_deg}
    else:
        props["fov"] = "omni"
    if cam.radius_override_m is not None:
        props["radius_m"] = {t.value: r for t, r in cam.radius_override_m.items()}
    if cam.optics is not None:
        props["optics"] = {"h_res_px": cam.optics.h_res_px, "hfov_deg": cam.optics.hfov_deg}
    return props


def cameras_to_geojson(cams: Iterable[Camera]) -> dict[str, Any]:
    return {
        "type": "FeatureCollection",
        "features": [
            {
                "type": "Feature",
                "geometry": {"type": "Point", "coordinates": [c.pos.lon, c.pos.lat]},
                "properties": camera_properties(c),
            }
            for c in cams
        ],
    }


def save_cameras(cams: Iterable[Camera]) -> bytes:
    """Serialize cameras so load_cameras(save_cameras(cams)) == cams."""
    return json.dumps(cameras_to_geojson(cams), indent=2).encode()
