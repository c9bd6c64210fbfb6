"""CCTV-aware pedestrian routing.

Ingests OpenStreetMap XML plus a camera dataset, models face-recognition
coverage per camera, splits walkways at coverage boundaries, and routes in
three modes: Privacy (avoid every covered meter), Safety (prefer covered
ground), and Baseline (shortest path).
"""

from .geo import GeoPoint, LocalXY, Segment
from .osm import PedNetwork, parse_osm
from .cameras import Camera, CoverageConfig, SurveillanceTask, load_cameras
from .graph import CoverageGraph, Mode, build_graph
from .routing import RouteRequest, RouteResult, RouteStatus, route

__version__ = "0.1.0"

__all__ = [
    "GeoPoint",
    "LocalXY",
    "Segment",
    "PedNetwork",
    "parse_osm",
    "Camera",
    "CoverageConfig",
    "SurveillanceTask",
    "load_cameras",
    "CoverageGraph",
    "Mode",
    "build_graph",
    "RouteRequest",
    "RouteResult",
    "RouteStatus",
    "route",
    "__version__",
]
