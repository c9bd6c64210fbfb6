"""Coverage-aware routing graph.

Ways are split wherever they cross a camera's coverage circle, so every
edge is either fully covered or fully clear. Mode weighting happens here:
Baseline edges cost their length, Privacy forbids covered edges outright,
Safety discounts covered edges by beta to pull routes toward cameras.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from .cameras import Camera, CoverageConfig, coverage_radius_m, covers
from .geo import (
    GeoPoint,
    LocalXY,
    Segment,
    point_segment_distance,
    circle_segment_intersection_params,
    project,
    unproject,
)
from .osm import PedNetwork

FORBIDDEN = math.inf

DEFAULT_SAFETY_BETA = 0.5

# Cut points closer than this along a segment collapse into one, meters.
CUT_DEDUPE_EPS_M = 1e-6

# Projected node positions closer than this are the same physical point.
COINCIDENT_NODE_EPS_M = 1e-9


class Mode(enum.Enum):
    PRIVACY = "privacy"
    SAFETY = "safety"
    BASELINE = "baseline"


@dataclass(frozen=True, slots=True)
class GraphNode:
    id: int
    pos: LocalXY
    geo: GeoPoint
    origin_osm_id: int | None  # None for nodes introduced by splitting


@dataclass(frozen=True, slots=True)
class GraphEdge:
    a: int
    b: int
    length_m: float
    covered: bool
    covering_camera_ids: tuple[str, ...]


@dataclass(frozen=True, slots=True)
class PlacedCamera:
    camera: Camera
    xy: LocalXY
    radius_m: float


@dataclass(frozen=True, slots=True)
class SplitPart:
    segment: Segment
    covered: bool
    covering_camera_ids: tuple[str, ...]


def edge_weight(edge: GraphEdge, mode: Mode, beta: float = DEFAULT_SAFETY_BETA) -> float:
    """Routing weight of an edge under a mode.

    Safety multiplies covered length by beta (must be in (0, 1)); Privacy
    returns FORBIDDEN (inf) for covered edges.
    """
    if not (0.0 < beta < 1.0):
        raise ValueError(f"beta must be in (0, 1), got {beta}")
    if mode is Mode.BASELINE:
        return edge.length_m
    if mode is Mode.PRIVACY:
        return FORBIDDEN if edge.covered else edge.length_m
    return edge.length_m * beta if edge.covered else edge.length_m


def split_segment(seg: Segment, cameras: Sequence[PlacedCamera]) -> list[SplitPart]:
    """Split seg at every coverage-circle crossing and classify the pieces.

    Sub-segments chain exactly from seg.a to seg.b. Each is classified by
    its midpoint; covered means at least one camera covers it. Cut points
    within 1e-6 m of each other or of an endpoint collapse.
    """
    length = seg.length_m
    cands = [pc for pc in cameras if point_segment_distance(pc.xy, seg) <= pc.radius_m]
    if not cands:
        return [SplitPart(seg, False, ())]

    ts: list[float] = []
    for pc in cands:
        ts.extend(circle_segment_intersection_params(pc.xy, pc.radius_m, seg))
    ts.sort()
    eps_t = CUT_DEDUPE_EPS_M / length
    cuts: list[float] = []
    for t in ts:
        if t < eps_t or t > 1.0 - eps_t:
            continue
        if cuts and t - cuts[-1] < eps_t:
            continue
        cuts.append(t)

    bounds = [seg.a] + [seg.point_at(t) for t in cuts] + [seg.b]
    parts: list[SplitPart] = []
    for p, q in zip(bounds, bounds[1:]):
        mid = LocalXY((p.x + q.x) / 2.0, (p.y + q.y) / 2.0)
        ids = sorted(pc.camera.id for pc in cands if covers(pc.camera, mid, pc.xy, pc.radius_m))
        parts.append(SplitPart(Segment(p, q), bool(ids), tuple(ids)))
    return parts


class _CameraGrid:
    """Uniform hash grid over camera positions for candidate pruning."""

    def __init__(self, placed: Sequence[PlacedCamera]):
        self.placed = placed
        self.max_radius = max((pc.radius_m for pc in placed), default=0.0)
        self.cell = max(self.max_radius, 25.0)
        self.cells: dict[tuple[int, int], list[PlacedCamera]] = {}
        for pc in placed:
            key = (int(pc.xy.x // self.cell), int(pc.xy.y // self.cell))
            self.cells.setdefault(key, []).append(pc)

    def near_segment(self, seg: Segment) -> list[PlacedCamera]:
        """Cameras whose coverage circle could touch seg."""
        if not self.placed:
            return []
        r = self.max_radius
        x0 = min(seg.a.x, seg.b.x) - r
        x1 = max(seg.a.x, seg.b.x) + r
        y0 = min(seg.a.y, seg.b.y) - r
        y1 = max(seg.a.y, seg.b.y) + r
        out: list[PlacedCamera] = []
        for cx in range(int(x0 // self.cell), int(x1 // self.cell) + 1):
            for cy in range(int(y0 // self.cell), int(y1 // self.cell) + 1):
                out.extend(self.cells.get((cx, cy), ()))
        return out


@dataclass
class CoverageGraph:
    """Split, classified routing graph plus per-mode weight caches."""

    nodes: list[GraphNode]
    edges: list[GraphEdge]
    adjacency: list[list[tuple[int, int]]]  # node -> [(edge index, other node)]
    cameras: tuple[PlacedCamera, ...]
    cfg: CoverageConfig
    origin: GeoPoint
    _xy: np.ndarray | None = field(default=None, repr=False)
    _privacy_eligible: np.ndarray | None = field(default=None, repr=False)
    _weight_cache: dict[tuple[Mode, float], list[list[tuple[float, int]]]] = field(
        default_factory=dict, repr=False
    )

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def node_xy(self) -> np.ndarray:
        """(n, 2) array of planar node positions."""
        if self._xy is None:
            self._xy = np.array([(n.pos.x, n.pos.y) for n in self.nodes], dtype=float)
        return self._xy

    def privacy_eligible(self) -> np.ndarray:
        """Bool mask of nodes with at least one clear incident edge."""
        if self._privacy_eligible is None:
            mask = np.zeros(len(self.nodes), dtype=bool)
            for e in self.edges:
                if not e.covered:
                    mask[e.a] = True
                    mask[e.b] = True
            self._privacy_eligible = mask
        return self._privacy_eligible

    def weighted_adjacency(self, mode: Mode, beta: float = DEFAULT_SAFETY_BETA) -> list[list[tuple[float, int]]]:
        """Per-node (weight, neighbor) lists; Privacy omits forbidden edges."""
        key = (mode, beta if mode is Mode.SAFETY else 0.0)
        cached = self._weight_cache.get(key)
        if cached is not None:
            return cached
        adj: list[list[tuple[float, int]]] = [[] for _ in self.nodes]
        for e in self.edges:
            w = edge_weight(e, mode, beta)
            if w == FORBIDDEN:
                continue
            adj[e.a].append((w, e.b))
            adj[e.b].append((w, e.a))
        self._weight_cache[key] = adj
        return adj

    def edge_between(self, u: int, v: int) -> GraphEdge | None:
        for idx, other in self.adjacency[u]:
            if other == v:
                return self.edges[idx]
        return None

    def covered_length_m(self) -> float:
        return math.fsum(e.length_m for e in self.edges if e.covered)

    def clear_length_m(self) -> float:
        return math.fsum(e.length_m for e in self.edges if not e.covered)

    def total_length_m(self) -> float:
        return math.fsum(e.length_m for e in self.edges)

    def to_geojson(self) -> dict[str, Any]:
        """Edges as a FeatureCollection of LineStrings (debug / UI overlay)."""
        feats = []
        for e in self.edges:
            a = self.nodes[e.a].geo
            b = self.nodes[e.b].geo
            feats.append({
                "type": "Feature",
                "geometry": {
                    "type": "LineString",
                    "coordinates": [[a.lon, a.lat], [b.lon, b.lat]],
                },
                "properties": {
                    "covered": e.covered,
                    "covering_camera_ids": list(e.covering_camera_ids),
                    "length_m": e.length_m,
                },
            })
        return {"type": "FeatureCollection", "features": feats}


def place_cameras(cams: Iterable[Camera], cfg: CoverageConfig, origin: GeoPoint) -> tuple[PlacedCamera, ...]:
    return tuple(
        PlacedCamera(c, project(c.pos, origin), coverage_radius_m(c, cfg)) for c in cams
    )


def build_graph(net: PedNetwork, cams: Sequence[Camera], cfg: CoverageConfig) -> CoverageGraph:
    """Project the network, split every way segment at coverage boundaries,
    classify sub-segments, and assemble the routing graph.

    Deterministic: ways are already canonically sorted, node ids are
    assigned in traversal order, and duplicate edges between the same node
    pair keep the shorter geometry.
    """
    origin = net.origin
    placed = place_cameras(cams, cfg, origin)
    grid = _CameraGrid(placed)

    nodes: list[GraphNode] = []
    osm_index: dict[int, int] = {}
    edge_map: dict[tuple[int, int], int] = {}
    edges: list[GraphEdge] = []

    def add_node(pos: LocalXY, osm_id: int | None) -> int:
        nid = len(nodes)
        nodes.append(GraphNode(nid, pos, unproject(pos, origin), osm_id))
        return nid

    def node_for_osm(osm_id: int, pos: LocalXY) -> int:
        idx = osm_index.get(osm_id)
        if idx is None:
            idx = add_node(pos, osm_id)
            osm_index[osm_id] = idx
        return idx

    def add_edge(u: int, v: int, part: SplitPart):
        if u == v:
            return
        key = (u, v) if u < v else (v, u)
        length = part.segment.length_m
        existing = edge_map.get(key)
        if existing is not None:
            if length < edges[existing].length_m:
                edges[existing] = GraphEdge(key[0], key[1], length, part.covered,
                                            part.covering_camera_ids)
            return
        edge_map[key] = len(edges)
        edges.append(GraphEdge(key[0], key[1], length, part.covered, part.covering_camera_ids))

    for way in net.ways:
        positions = [project(net.nodes[ref].pos, origin) for ref in way.node_refs]
        for (ref_a, pos_a), (ref_b, pos_b) in zip(
            zip(way.node_refs, positions), zip(way.node_refs[1:], positions[1:])
        ):
            if math.hypot(pos_b.x - pos_a.x, pos_b.y - pos_a.y) < COINCIDENT_NODE_EPS_M:
                # Distinct OSM nodes projecting onto the same point: unify so
                # connectivity survives and Segment construction stays total.
                ia = node_for_osm(ref_a, pos_a)
                if ref_b not in osm_index:
                    osm_index[ref_b] = ia
                continue
            seg = Segment(pos_a, pos_b)
            parts = split_segment(seg, grid.near_segment(seg))
            chain = [node_for_osm(ref_a, pos_a)]
            for part in parts[:-1]:
                chain.append(add_node(part.segment.b, None))
            chain.append(node_for_osm(ref_b, pos_b))
            for (u, v), part in zip(zip(chain, chain[1:]), parts):
                add_edge(u, v, part)

    adjacency: list[list[tuple[int, int]]] = [[] for _ in nodes]
    for idx, e in enumerate(edges):
        adjacency[e.a].append((idx, e.b))
        adjacency[e.b].append((idx, e.a))

    return CoverageGraph(nodes=nodes, edges=edges, adjacency=adjacency,
                         cameras=placed, cfg=cfg, origin=origin)
