"""Endpoint snapping, mode routing, gap statuses, and exposure accounting."""

import math
import random

import numpy as np
import pytest

from cctvroute.cameras import Camera, CoverageConfig, load_cameras
from cctvroute.geo import GeoPoint, LocalXY, unproject, project
from cctvroute.graph import CoverageGraph, GraphEdge, GraphNode, Mode, build_graph
from cctvroute.osm import parse_osm
from cctvroute.routing import (
    RouteRequest,
    RouteResult,
    RouteStatus,
    path_exposure_m,
    path_length_m,
    route,
    shortest_path,
    snap,
)

from synth import ORIGIN, grid_instance, make_network, two_route_fixture


def build_fixture(fx, radius_m=None):
    net = parse_osm(fx.osm)
    cams = load_cameras(fx.cameras)
    cfg = CoverageConfig(global_radius_m=fx.radius_m if radius_m is None else radius_m)
    return build_graph(net, cams, cfg)


def _up(x: float, y: float) -> GeoPoint:
    return unproject(LocalXY(x, y), ORIGIN)


# ---------------------------------------------------------------- requests

def test_request_validation():
    a, b = _up(-10, 0), _up(10, 0)
    with pytest.raises(ValueError):
        RouteRequest(a, b, snap_gap_max_m=0.0)
    with pytest.raises(ValueError):
        RouteRequest(a, b, complete_gap_max_m=-5.0)
    with pytest.raises(ValueError):
        RouteRequest(a, b, mode=Mode.SAFETY, beta=1.0)
    req = RouteRequest(a, b)
    assert req.snap_gap_max_m == 100.0
    assert req.complete_gap_max_m == 25.0


# ---------------------------------------------------------------- snapping

def test_snap_privacy_skips_covered_nodes(snap_probe):
    g = build_fixture(snap_probe)
    probe = snap_probe.points["probe"]
    idx, gap = snap(probe, g, Mode.BASELINE)
    assert gap == pytest.approx(5.0, abs=0.01)  # nearest node sits on the covered way
    assert g.nodes[idx].pos.x == pytest.approx(-27.5, abs=1e-6)

    idx, gap = snap(probe, g, Mode.PRIVACY)
    assert gap == pytest.approx(30.0, abs=0.01)  # clear way is six times farther
    assert g.nodes[idx].pos.x == pytest.approx(7.5, abs=1e-6)


def test_snap_tie_breaks_to_smaller_node_id():
    nodes = [
        GraphNode(0, LocalXY(10.0, 0.0), _up(10.0, 0.0), 1),
        GraphNode(1, LocalXY(-10.0, 0.0), _up(-10.0, 0.0), 2),
    ]
    edges = [GraphEdge(0, 1, 20.0, False, ())]
    g = CoverageGraph(nodes=nodes, edges=edges, adjacency=[[(0, 1)], [(0, 0)]],
                      cameras=(), cfg=CoverageConfig(global_radius_m=10.0), origin=ORIGIN)
    idx, gap = snap(ORIGIN, g, Mode.BASELINE)  # exact distance tie
    assert idx == 0
    assert gap == pytest.approx(10.0, abs=1e-6)


def test_snap_returns_none_without_candidates(snap_probe):
    g = build_fixture(snap_probe)
    assert snap(ORIGIN, g, Mode.BASELINE) is not None
    # a graph that is covered wall to wall has no privacy candidates
    net = make_network({1: _up(-100, 0), 2: _up(100, 0)}, [(11, (1, 2))])
    g2 = build_graph(net, [Camera("c1", ORIGIN)], CoverageConfig(global_radius_m=150.0))
    assert snap(ORIGIN, g2, Mode.PRIVACY) is None
    res = route(RouteRequest(_up(-100, 0), _up(100, 0), mode=Mode.PRIVACY), g2)
    assert res.status is RouteStatus.NO_ROUTE
    assert res.polyline == ()
    assert res.overhead_vs_baseline is None


# ---------------------------------------------------------------- modes

def test_two_route_fixture_modes(two_route):
    g = build_fixture(two_route)
    o, d = two_route.points["origin"], two_route.points["destination"]

    base = route(RouteRequest(o, d, mode=Mode.BASELINE), g)
    assert base.status is RouteStatus.COMPLETE
    assert base.length_m == pytest.approx(200.0, abs=1e-3)
    assert base.exposure_m == pytest.approx(200.0, abs=1e-3)
    assert base.overhead_vs_baseline == pytest.approx(1.0, rel=1e-6)

    safe = route(RouteRequest(o, d, mode=Mode.SAFETY), g)
    assert safe.status is RouteStatus.COMPLETE
    assert safe.length_m == pytest.approx(200.0, abs=1e-3)
    assert safe.exposure_m == pytest.approx(200.0, abs=1e-3)

    priv = route(RouteRequest(o, d, mode=Mode.PRIVACY), g)
    assert priv.status is RouteStatus.COMPLETE
    assert priv.length_m == pytest.approx(400.0, abs=1e-3)
    assert priv.exposure_m == 0.0
    assert priv.overhead_vs_baseline == pytest.approx(2.0, rel=1e-5)
    assert priv.gap_origin_m < 0.001 and priv.gap_destination_m < 0.001

    # polyline endpoints land on the requested points
    assert priv.polyline[0].lat == pytest.approx(o.lat, abs=1e-7)
    assert priv.polyline[-1].lon == pytest.approx(d.lon, abs=1e-7)
    assert len(priv.polyline) == len(priv.node_path)
    assert path_length_m(g, list(priv.node_path)) == pytest.approx(priv.length_m)
    assert path_exposure_m(g, list(priv.node_path)) == 0.0


def test_safety_detour_longer_than_privacy(safety_detour):
    g = build_fixture(safety_detour)
    o, d = safety_detour.points["origin"], safety_detour.points["destination"]

    priv = route(RouteRequest(o, d, mode=Mode.PRIVACY), g)
    assert priv.status is RouteStatus.COMPLETE
    assert priv.length_m == pytest.approx(300.0, abs=1e-3)
    assert priv.exposure_m == 0.0
    assert priv.overhead_vs_baseline == pytest.approx(1.0, rel=1e-6)

    safe = route(RouteRequest(o, d, mode=Mode.SAFETY), g)
    assert safe.status is RouteStatus.COMPLETE
    assert safe.length_m == pytest.approx(360.0, abs=1e-2)
    assert safe.exposure_m == pytest.approx(140.0, abs=1e-2)
    assert safe.overhead_vs_baseline == pytest.approx(1.2, rel=1e-4)
    assert safe.length_m > priv.length_m

    base = route(RouteRequest(o, d, mode=Mode.BASELINE), g)
    assert base.length_m == pytest.approx(300.0, abs=1e-3)
    assert base.exposure_m == 0.0


def test_safety_beta_changes_choice(safety_detour):
    # at beta 0.9 the covered bump weighs 20 + 140 * 0.9 = 146 > 100
    g = build_fixture(safety_detour)
    o, d = safety_detour.points["origin"], safety_detour.points["destination"]
    safe = route(RouteRequest(o, d, mode=Mode.SAFETY, beta=0.9), g)
    assert safe.length_m == pytest.approx(300.0, abs=1e-3)
    assert safe.exposure_m == 0.0


# ---------------------------------------------------------------- gaps

def test_truncated_when_wall_blocks_last_60m(ring_truncated):
    g = build_fixture(ring_truncated)
    o, d = ring_truncated.points["origin"], ring_truncated.points["destination"]
    res = route(RouteRequest(o, d, mode=Mode.PRIVACY), g)
    assert res.status is RouteStatus.TRUNCATED
    assert res.length_m == pytest.approx(140.0, abs=1e-3)
    assert res.gap_destination_m == pytest.approx(60.0, abs=0.01)
    assert res.exposure_m == 0.0
    # achieved endpoint is the cut node right before the wall
    end = project(res.polyline[-1], g.origin)
    assert end.x == pytest.approx(40.0, abs=1e-4)
    assert res.overhead_vs_baseline == pytest.approx(140.0 / 200.0, rel=1e-6)


def test_gap_thresholds_move_the_status(ring_truncated):
    g = build_fixture(ring_truncated)
    o, d = ring_truncated.points["origin"], ring_truncated.points["destination"]
    res = route(RouteRequest(o, d, mode=Mode.PRIVACY, complete_gap_max_m=60.0), g)
    assert res.status is RouteStatus.COMPLETE  # 60 m shortfall now tolerated
    res = route(RouteRequest(o, d, mode=Mode.PRIVACY, complete_gap_max_m=10.0), g)
    assert res.status is RouteStatus.TRUNCATED
    res = route(RouteRequest(o, d, mode=Mode.PRIVACY, snap_gap_max_m=59.0), g)
    assert res.status is RouteStatus.NO_ROUTE


def test_no_route_when_wall_blocks_last_150m(ring_no_route):
    g = build_fixture(ring_no_route)
    o, d = ring_no_route.points["origin"], ring_no_route.points["destination"]
    res = route(RouteRequest(o, d, mode=Mode.PRIVACY), g)
    assert res.status is RouteStatus.NO_ROUTE
    assert res.polyline == ()
    assert res.length_m == 0.0
    assert res.overhead_vs_baseline is None

    # a larger allowance turns the same request into a truncated route
    res = route(RouteRequest(o, d, mode=Mode.PRIVACY, snap_gap_max_m=200.0), g)
    assert res.status is RouteStatus.TRUNCATED
    assert res.gap_destination_m == pytest.approx(150.0, abs=0.01)
    assert res.length_m == pytest.approx(50.0, abs=1e-3)


def test_boundary_gap_of_exactly_100m_is_truncated(ring_boundary):
    g = build_fixture(ring_boundary)
    o, d = ring_boundary.points["origin"], ring_boundary.points["destination"]
    res = route(RouteRequest(o, d, mode=Mode.PRIVACY), g)
    assert res.status is RouteStatus.TRUNCATED
    assert res.gap_destination_m == pytest.approx(100.0, abs=0.01)
    assert res.gap_destination_m <= 100.0  # the default cap is inclusive


def test_disconnected_target_reports_gap():
    pts = {1: _up(-100, 0), 2: _up(-50, 0), 3: _up(50, 0), 4: _up(100, 0)}
    net = make_network(pts, [(11, (1, 2)), (12, (3, 4))])
    g = build_graph(net, [], CoverageConfig(global_radius_m=10.0))
    assert shortest_path(g, 0, 2, Mode.BASELINE) is None

    res = route(RouteRequest(_up(-100, 0), _up(100, 0)), g)
    assert res.status is RouteStatus.NO_ROUTE  # 150 m shortfall beats the cap
    res = route(RouteRequest(_up(-100, 0), _up(100, 0), snap_gap_max_m=200.0), g)
    assert res.status is RouteStatus.TRUNCATED
    assert res.length_m == pytest.approx(50.0, abs=1e-3)
    assert res.gap_destination_m == pytest.approx(150.0, abs=0.01)


def test_origin_equals_destination(two_route):
    g = build_fixture(two_route)
    o = two_route.points["origin"]
    res = route(RouteRequest(o, o, mode=Mode.PRIVACY), g)
    assert res.status is RouteStatus.COMPLETE
    assert res.length_m == 0.0
    assert res.exposure_m == 0.0
    assert len(res.polyline) == 1
    assert res.overhead_vs_baseline is None  # zero-length baseline


# ---------------------------------------------------------------- via

def test_via_point_forces_the_detour(two_route):
    g = build_fixture(two_route)
    o, d = two_route.points["origin"], two_route.points["destination"]
    via = two_route.points["via_detour"]

    priv = route(RouteRequest(o, d, via=(via,), mode=Mode.PRIVACY), g)
    assert priv.status is RouteStatus.COMPLETE
    assert priv.length_m == pytest.approx(400.0, abs=1e-3)
    assert priv.exposure_m == 0.0

    # safety reaches the via corner, then beta pulls the return leg back
    # onto the covered street: 100 out, 100 back, 200 covered
    safe = route(RouteRequest(o, d, via=(via,), mode=Mode.SAFETY), g)
    assert safe.status is RouteStatus.COMPLETE
    assert safe.length_m == pytest.approx(400.0, abs=1e-3)
    assert safe.exposure_m == pytest.approx(200.0, abs=1e-3)

    # without the via, safety rides the covered street the whole way
    direct = route(RouteRequest(o, d, mode=Mode.SAFETY), g)
    assert direct.length_m == pytest.approx(200.0, abs=1e-3)


def test_shortest_path_trivial_and_unreachable(two_route):
    g = build_fixture(two_route)
    assert shortest_path(g, 3, 3, Mode.BASELINE) == [3]
    path = shortest_path(g, 0, 1, Mode.BASELINE)
    assert path is not None
    assert path[0] == 0 and path[-1] == 1


# ---------------------------------------------------------------- oracles

def _sampled_exposure(g, node_path, step=0.05):
    """Brute-force exposure: sample the path and test camera distances."""
    cams = np.array([(pc.xy.x, pc.xy.y) for pc in g.cameras])
    radii = np.array([pc.radius_m for pc in g.cameras])
    covered = 0.0
    for u, v in zip(node_path, node_path[1:]):
        a, b = g.nodes[u].pos, g.nodes[v].pos
        length = math.hypot(b.x - a.x, b.y - a.y)
        n = max(int(length / step), 1)
        ts = (np.arange(n) + 0.5) / n
        xs = a.x + ts * (b.x - a.x)
        ys = a.y + ts * (b.y - a.y)
        d2 = (xs[:, None] - cams[None, :, 0]) ** 2 + (ys[:, None] - cams[None, :, 1]) ** 2
        hit = (d2 <= (radii[None, :] ** 2)).any(axis=1)
        covered += hit.sum() * (length / n)
    return covered


def test_exposure_matches_sampling(two_route, safety_detour):
    for fx, mode, expect in ((two_route, Mode.SAFETY, 200.0),
                             (safety_detour, Mode.SAFETY, 140.0)):
        g = build_fixture(fx)
        res = route(RouteRequest(fx.points["origin"], fx.points["destination"], mode=mode), g)
        assert res.exposure_m == pytest.approx(expect, abs=0.01)
        sampled = _sampled_exposure(g, res.node_path)
        assert sampled == pytest.approx(res.exposure_m, abs=1.0)


def test_exposure_sampling_on_random_grids():
    rng = random.Random(77)
    for trial in range(10):
        inst = grid_instance(rng, 7, 6, 45.0, 6.0, 15)
        g = build_graph(inst.net, inst.cameras, CoverageConfig(global_radius_m=15.0))
        res = route(RouteRequest(inst.corner_a, inst.corner_b, mode=Mode.SAFETY), g)
        assert res.status is RouteStatus.COMPLETE
        sampled = _sampled_exposure(g, res.node_path, step=0.1)
        assert sampled == pytest.approx(res.exposure_m, abs=max(1.0, 0.01 * res.exposure_m))


def test_routing_is_deterministic():
    inst = grid_instance(random.Random(31), 8, 8, 40.0, 5.0, 20)
    cfg = CoverageConfig(global_radius_m=15.0)
    results: list[RouteResult] = []
    for _ in range(2):
        g = build_graph(inst.net, inst.cameras, cfg)
        req = RouteRequest(inst.corner_a, inst.corner_b, mode=Mode.PRIVACY)
        results.append(route(req, g))
    assert results[0] == results[1]
