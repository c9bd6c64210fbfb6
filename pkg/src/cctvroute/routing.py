"""Route computation over a coverage graph.

Endpoints snap to graph nodes (Privacy snaps only to nodes with a clear
incident edge). When a destination is unreachable the route runs to the
nearest reachable node instead and the shortfall is reported as a gap:
gaps up to 25 m still count as Complete, up to the 100 m default cap as
Truncated, beyond that NoRoute.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from heapq import heappush, heappop

import numpy as np

from .cameras import CoverageConfig
from .geo import GeoPoint, haversine_m, project
from .graph import CoverageGraph, Mode, DEFAULT_SAFETY_BETA

DEFAULT_SNAP_GAP_MAX_M = 100.0
DEFAULT_COMPLETE_GAP_MAX_M = 25.0


class RouteStatus(enum.Enum):
    COMPLETE = "complete"
    TRUNCATED = "truncated"
    NO_ROUTE = "no_route"


@dataclass(frozen=True)
class RouteRequest:
    origin: GeoPoint
    destination: GeoPoint
    via: tuple[GeoPoint, ...] = ()
    mode: Mode = Mode.BASELINE
    beta: float = DEFAULT_SAFETY_BETA
    snap_gap_max_m: float = DEFAULT_SNAP_GAP_MAX_M
    complete_gap_max_m: float = DEFAULT_COMPLETE_GAP_MAX_M
    cfg: CoverageConfig | None = None  # informational; the graph's config governs geometry

    def __post_init__(self):
        if self.snap_gap_max_m <= 0:
            raise ValueError(f"snap_gap_max_m must be positive, got {self.snap_gap_max_m}")
        if self.complete_gap_max_m <= 0:
            raise ValueError(f"complete_gap_max_m must be positive, got {self.complete_gap_max_m}")
        if not (0.0 < self.beta < 1.0):
            raise ValueError(f"beta must be in (0, 1), got {self.beta}")


@dataclass(frozen=True)
class RouteResult:
    status: RouteStatus
    polyline: tuple[GeoPoint, ...]
    length_m: float
    exposure_m: float
    gap_origin_m: float
    gap_destination_m: float
    overhead_vs_baseline: float | None
    node_path: tuple[int, ...] = ()


_NO_ROUTE = RouteResult(RouteStatus.NO_ROUTE, (), 0.0, 0.0, 0.0, 0.0, None)


def snap(p: GeoPoint, g: CoverageGraph, mode: Mode) -> tuple[int, float] | None:
    """Nearest snappable node for p under mode, with the haversine gap.

    Privacy restricts candidates to nodes with at least one clear incident
    edge. Returns None when no candidate exists. Ties break toward the
    smaller node id.
    """
    if g.node_count == 0:
        return None
    xy = g.node_xy()
    local = project(p, g.origin)
    d2 = (xy[:, 0] - local.x) ** 2 + (xy[:, 1] - local.y) ** 2
    if mode is Mode.PRIVACY:
        mask = g.privacy_eligible()
        if not mask.any():
            return None
        d2 = np.where(mask, d2, np.inf)
    idx = int(np.argmin(d2))  # argmin returns the first (smallest-id) minimum
    return idx, haversine_m(p, g.nodes[idx].geo)


def shortest_path(g: CoverageGraph, src: int, dst: int, mode: Mode,
                  beta: float = DEFAULT_SAFETY_BETA) -> list[int] | None:
    """Cheapest node path from src to dst under the mode's weights, or None.

    A* with a Euclidean heuristic (scaled by beta for Safety, which keeps
    it admissible since every covered edge costs at least beta * length).
    Ties pop the smaller node id first, so results are stable.
    """
    if src == dst:
        return [src]
    adj = g.weighted_adjacency(mode, beta)
    xy = g.node_xy()
    tx, ty = xy[dst]
    scale = beta if mode is Mode.SAFETY else 1.0
    xs = xy[:, 0]
    ys = xy[:, 1]

    n = g.node_count
    dist = [math.inf] * n
    pred = [-1] * n
    done = bytearray(n)
    dist[src] = 0.0
    h0 = math.hypot(xs[src] - tx, ys[src] - ty) * scale
    heap = [(h0, src)]
    while heap:
        f, u = heappop(heap)
        if done[u]:
            continue
        done[u] = 1
        if u == dst:
            break
        du = dist[u]
        for w, v in adj[u]:
            if done[v]:
                continue
            nd = du + w
            if nd < dist[v]:
                dist[v] = nd
                pred[v] = u
                heappush(heap, (nd + math.hypot(xs[v] - tx, ys[v] - ty) * scale, v))
    if not done[dst]:
        return None
    path = [dst]
    while path[-1] != src:
        path.append(pred[path[-1]])
    path.reverse()
    return path


def _dijkstra_all(g: CoverageGraph, src: int, mode: Mode, beta: float):
    """Distances and predecessors from src to every reachable node."""
    adj = g.weighted_adjacency(mode, beta)
    n = g.node_count
    dist = [math.inf] * n
    pred = [-1] * n
    done = bytearray(n)
    dist[src] = 0.0
    heap = [(0.0, src)]
    while heap:
        d, u = heappop(heap)
        if done[u]:
            continue
        done[u] = 1
        for w, v in adj[u]:
            if done[v]:
                continue
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                pred[v] = u
                heappush(heap, (nd, v))
    return dist, pred


def _reconstruct(pred: list[int], src: int, dst: int) -> list[int]:
    path = [dst]
    while path[-1] != src:
        path.append(pred[path[-1]])
    path.reverse()
    return path


def _leg(g: CoverageGraph, start: int, target: GeoPoint, mode: Mode,
         beta: float) -> tuple[list[int], float]:
    """Route one leg from a graph node toward a target point.

    Returns the node path and the gap from the achieved endpoint to the
    target. When the snapped target is unreachable the leg runs to the
    reachable node nearest the target (ties toward the smaller id).
    """
    snapped = snap(target, g, mode)
    if snapped is None:
        return [start], haversine_m(target, g.nodes[start].geo)
    tnode, tgap = snapped
    path = shortest_path(g, start, tnode, mode, beta)
    if path is not None:
        return path, tgap

    dist, pred = _dijkstra_all(g, start, mode, beta)
    xy = g.node_xy()
    local = project(target, g.origin)
    d2 = (xy[:, 0] - local.x) ** 2 + (xy[:, 1] - local.y) ** 2
    reachable = np.array([d != math.inf for d in dist], dtype=bool)
    d2 = np.where(reachable, d2, np.inf)
    best = int(np.argmin(d2))
    return _reconstruct(pred, start, best), haversine_m(target, g.nodes[best].geo)


def path_length_m(g: CoverageGraph, path: list[int]) -> float:
    return math.fsum(
        g.edge_between(u, v).length_m for u, v in zip(path, path[1:])
    )


def path_exposure_m(g: CoverageGraph, path: list[int]) -> float:
    """Meters of the path spent on covered edges."""
    acc = []
    for u, v in zip(path, path[1:]):
        e = g.edge_between(u, v)
        if e.covered:
            acc.append(e.length_m)
    return math.fsum(acc)


def _route_mode(req: RouteRequest, g: CoverageGraph, mode: Mode) -> RouteResult:
    snapped = snap(req.origin, g, mode)
    if snapped is None:
        return _NO_ROUTE
    start, gap_origin = snapped
    if gap_origin > req.snap_gap_max_m:
        return _NO_ROUTE

    nodes = [start]
    current = start
    gap_dest = 0.0
    for target in list(req.via) + [req.destination]:
        leg, gap_dest = _leg(g, current, target, mode, req.beta)
        nodes.extend(leg[1:])
        current = leg[-1]
    if gap_dest > req.snap_gap_max_m:
        return _NO_ROUTE

    if gap_origin <= req.complete_gap_max_m and gap_dest <= req.complete_gap_max_m:
        status = RouteStatus.COMPLETE
    else:
        status = RouteStatus.TRUNCATED
    return RouteResult(
        status=status,
        polyline=tuple(g.nodes[i].geo for i in nodes),
        length_m=path_length_m(g, nodes),
        exposure_m=path_exposure_m(g, nodes),
        gap_origin_m=gap_origin,
        gap_destination_m=gap_dest,
        overhead_vs_baseline=None,
        node_path=tuple(nodes),
    )


def route(req: RouteRequest, g: CoverageGraph, include_baseline: bool = True) -> RouteResult:
    """Compute the route for req on g.

    With include_baseline, overhead_vs_baseline carries the raw length
    ratio against a Baseline route for the same request (None when that
    baseline has no route or zero length).
    """
    result = _route_mode(req, g, req.mode)
    if not include_baseline or result.status is RouteStatus.NO_ROUTE:
        return result
    if req.mode is Mode.BASELINE:
        base = result
    else:
        base = _route_mode(req, g, Mode.BASELINE)
    overhead = None
    if base.status is not RouteStatus.NO_ROUTE and base.length_m > 0.0:
        overhead = result.length_m / base.length_m
    return RouteResult(
        status=result.status,
        polyline=result.polyline,
        length_m=result.length_m,
        exposure_m=result.exposure_m,
        gap_origin_m=result.gap_origin_m,
        gap_destination_m=result.gap_destination_m,
        overhead_vs_baseline=overhead,
        node_path=result.node_path,
    )
