"""Batch experiments: a matrix of OD pairs times routing modes.

Runs every pair under every (mode, radius) column, derives per-cell
overhead factors against the Safety 10 m reference column, and averages
each column the way the field study does: NoRoute cells are excluded,
Truncated cells are included at their on-graph length.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from decimal import Decimal, ROUND_HALF_UP
from importlib import resources
from math import fsum
from typing import Any, Iterable, Mapping, Sequence

from .cameras import Camera, CoverageConfig, SurveillanceTask
from .geo import GeoPoint
from .graph import DEFAULT_SAFETY_BETA, Mode, build_graph
from .osm import PedNetwork
from .routing import (
    DEFAULT_COMPLETE_GAP_MAX_M,
    DEFAULT_SNAP_GAP_MAX_M,
    RouteRequest,
    RouteStatus,
    route,
)

# The study's column set: one safety-first column and three privacy columns
# at the 10 / 15 / 25 m radius tiers.
DEFAULT_MODES: tuple[tuple[Mode, float], ...] = (
    (Mode.SAFETY, 10.0),
    (Mode.PRIVACY, 10.0),
    (Mode.PRIVACY, 15.0),
    (Mode.PRIVACY, 25.0),
)

REFERENCE_MODE: tuple[Mode, float] = (Mode.SAFETY, 10.0)

BUNDLED_SPEC_RESOURCE = "data/jyvaskyla_od_pairs.json"


class SpecFormatError(ValueError):
    """Experiment spec file violates the schema."""


@dataclass(frozen=True)
class ODPair:
    name: str
    origin: GeoPoint
    destination: GeoPoint
    via: tuple[GeoPoint, ...] = ()


@dataclass(frozen=True)
class ExperimentSpec:
    pairs: tuple[ODPair, ...]
    modes: tuple[tuple[Mode, float], ...] = DEFAULT_MODES

    def __post_init__(self):
        if not self.pairs:
            raise SpecFormatError("spec has no OD pairs")
        names = [p.name for p in self.pairs]
        if len(set(names)) != len(names):
            raise SpecFormatError("duplicate pair names")
        if not self.modes:
            raise SpecFormatError("spec has no modes")
        for m, r in self.modes:
            if r <= 0:
                raise SpecFormatError(f"non-positive radius {r} for mode {m.value}")


@dataclass(frozen=True)
class Cell:
    """One pair under one (mode, radius) column."""

    pair: str
    mode: Mode
    radius_m: float
    status: RouteStatus
    length_m: float = 0.0
    exposure_m: float = 0.0
    gap_origin_m: float = 0.0
    gap_destination_m: float = 0.0
    overhead: float | None = None  # 1-decimal factor vs the reference cell
    overhead_vs_baseline: float | None = None
    polyline: tuple[GeoPoint, ...] = ()


@dataclass(frozen=True)
class ModeAverage:
    mode: Mode
    radius_m: float
    mean_length_m: float | None
    factor: float | None  # 1-decimal, vs the reference column mean
    included: int
    excluded: int


@dataclass(frozen=True)
class ExperimentReport:
    spec: ExperimentSpec
    cells: dict[tuple[str, Mode, float], Cell]
    averages: dict[tuple[Mode, float], ModeAverage]
    config: dict[str, Any] = field(default_factory=dict)


def round_half_up(x: float, ndigits: int = 0) -> float:
    """Round-half-up (0.05 at one decimal goes to 0.1, not 0.0)."""
    q = Decimal(1).scaleb(-ndigits)
    return float(Decimal(repr(float(x))).quantize(q, rounding=ROUND_HALF_UP))


def overhead_factor(length_m: float, reference_length_m: float) -> float:
    """Length as a 1-decimal multiple of the reference length."""
    if reference_length_m <= 0:
        raise ValueError(f"reference length must be positive, got {reference_length_m}")
    return round_half_up(length_m / reference_length_m, 1)


def render_distance(meters: float) -> str:
    """Human distance: nearest 10 m below 1 km, else 0.01 km with zeros
    stripped ("760m", "1.28km", "4.3km"). 995 m rounds up to "1000m"."""
    if meters < 1000.0:
        return f"{int(round_half_up(meters / 10.0) * 10)}m"
    km = round_half_up(meters / 1000.0, 2)
    text = f"{km:.2f}".rstrip("0").rstrip(".")
    return f"{text}km"


def render_overhead(factor: float) -> str:
    return f"{factor:.1f}x"


def _parse_point(where: str, raw: Any) -> GeoPoint:
    if not isinstance(raw, dict) or "lat" not in raw or "lon" not in raw:
        raise SpecFormatError(f"{where} must be an object with lat and lon")
    try:
        return GeoPoint(float(raw["lat"]), float(raw["lon"]))
    except (TypeError, ValueError) as exc:
        raise SpecFormatError(f"{where}: {exc}") from exc


def load_spec(data: bytes | str) -> ExperimentSpec:
    """Load an experiment spec from JSON.

    Schema: {"pairs": [{"name", "origin": {"lat","lon"}, "destination": ...,
    "via": [...]?}, ...], "modes": [["privacy", 10], ...]?}. Modes default
    to the study's four columns.
    """
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SpecFormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("pairs"), list):
        raise SpecFormatError("spec must be an object with a pairs list")

    pairs = []
    for i, raw in enumerate(doc["pairs"]):
        if not isinstance(raw, dict):
            raise SpecFormatError(f"pair {i}: not an object")
        name = raw.get("name")
        if not isinstance(name, str) or not name:
            raise SpecFormatError(f"pair {i}: name must be a non-empty string")
        origin = _parse_point(f"pair {i}: origin", raw.get("origin"))
        dest = _parse_point(f"pair {i}: destination", raw.get("destination"))
        via_raw = raw.get("via", [])
        if not isinstance(via_raw, list):
            raise SpecFormatError(f"pair {i}: via must be a list")
        via = tuple(_parse_point(f"pair {i}: via[{j}]", v) for j, v in enumerate(via_raw))
        pairs.append(ODPair(name, origin, dest, via))

    modes: tuple[tuple[Mode, float], ...] = DEFAULT_MODES
    if "modes" in doc:
        if not isinstance(doc["modes"], list):
            raise SpecFormatError("modes must be a list of [mode, radius_m]")
        parsed = []
        for i, raw in enumerate(doc["modes"]):
            if not isinstance(raw, (list, tuple)) or len(raw) != 2:
                raise SpecFormatError(f"mode {i}: expected [mode, radius_m]")
            try:
                m = Mode(raw[0])
            except ValueError:
                raise SpecFormatError(f"mode {i}: unknown mode {raw[0]!r}")
            try:
                r = float(raw[1])
            except (TypeError, ValueError):
                raise SpecFormatError(f"mode {i}: radius must be a number")
            parsed.append((m, r))
        modes = tuple(parsed)
    return ExperimentSpec(tuple(pairs), modes)


def bundled_jyvaskyla_spec() -> ExperimentSpec:
    """The six downtown Jyvaskyla OD pairs shipped with the package."""
    data = resources.files("cctvroute").joinpath(BUNDLED_SPEC_RESOURCE).read_bytes()
    return load_spec(data)


def summarize(cells: Iterable[Cell],
              reference: tuple[Mode, float] = REFERENCE_MODE) -> dict[tuple[Mode, float], ModeAverage]:
    """Column averages. NoRoute cells are excluded, Truncated included.

    Each column's factor is its mean divided by the reference column's
    mean (over the reference column's own routed cells), rounded half-up
    to one decimal.
    """
    groups: dict[tuple[Mode, float], list[Cell]] = {}
    for c in cells:
        groups.setdefault((c.mode, c.radius_m), []).append(c)

    def mean_of(key) -> tuple[float | None, int, int]:
        group = groups.get(key, [])
        routed = [c.length_m for c in group if c.status is not RouteStatus.NO_ROUTE]
        if not routed:
            return None, 0, len(group)
        return fsum(routed) / len(routed), len(routed), len(group) - len(routed)

    ref_mean, _, _ = mean_of(reference)
    out: dict[tuple[Mode, float], ModeAverage] = {}
    for key in groups:
        mean, included, excluded = mean_of(key)
        factor = None
        if key != reference and mean is not None and ref_mean:
            factor = round_half_up(mean / ref_mean, 1)
        out[key] = ModeAverage(key[0], key[1], mean, factor, included, excluded)
    return out


def run_matrix(spec: ExperimentSpec, net: PedNetwork, cameras: Sequence[Camera], *,
               task: SurveillanceTask = SurveillanceTask.RECOGNITION,
               beta: float = DEFAULT_SAFETY_BETA,
               snap_gap_max_m: float = DEFAULT_SNAP_GAP_MAX_M,
               complete_gap_max_m: float = DEFAULT_COMPLETE_GAP_MAX_M) -> ExperimentReport:
    """Route every pair under every column and summarize.

    Graphs are built once per distinct radius. Overhead factors compare
    each cell to the reference (Safety 10 m) cell of the same pair; the
    column is skipped when the spec does not include the reference mode.
    """
    radii = sorted({r for _, r in spec.modes})
    graphs = {
        r: build_graph(net, cameras, CoverageConfig(task=task, global_radius_m=r))
        for r in radii
    }

    cells: dict[tuple[str, Mode, float], Cell] = {}
    for pair in spec.pairs:
        for mode, radius in spec.modes:
            req = RouteRequest(
                origin=pair.origin, destination=pair.destination, via=pair.via,
                mode=mode, beta=beta,
                snap_gap_max_m=snap_gap_max_m, complete_gap_max_m=complete_gap_max_m,
            )
            res = route(req, graphs[radius])
            cells[(pair.name, mode, radius)] = Cell(
                pair=pair.name, mode=mode, radius_m=radius, status=res.status,
                length_m=res.length_m, exposure_m=res.exposure_m,
                gap_origin_m=res.gap_origin_m, gap_destination_m=res.gap_destination_m,
                overhead_vs_baseline=res.overhead_vs_baseline, polyline=res.polyline,
            )

    has_reference = REFERENCE_MODE in spec.modes
    if has_reference:
        for pair in spec.pairs:
            ref = cells[(pair.name, *REFERENCE_MODE)]
            if ref.status is RouteStatus.NO_ROUTE or ref.length_m <= 0:
                continue
            for mode, radius in spec.modes:
                if (mode, radius) == REFERENCE_MODE:
                    continue
                key = (pair.name, mode, radius)
                cell = cells[key]
                if cell.status is RouteStatus.NO_ROUTE:
                    continue
                cells[key] = replace(cell, overhead=overhead_factor(cell.length_m, ref.length_m))

    averages = summarize(cells.values())
    config = {
        "task": task.value,
        "beta": beta,
        "snap_gap_max_m": snap_gap_max_m,
        "complete_gap_max_m": complete_gap_max_m,
        "reference": {"mode": REFERENCE_MODE[0].value, "radius_m": REFERENCE_MODE[1]}
        if has_reference else None,
    }
    return ExperimentReport(spec=spec, cells=cells, averages=averages, config=config)


def report_to_dict(report: ExperimentReport) -> dict[str, Any]:
    """Machine-readable report (geometry excluded; see cell_geojson)."""
    cells = []
    for pair in report.spec.pairs:
        for mode, radius in report.spec.modes:
            c = report.cells[(pair.name, mode, radius)]
            cells.append({
                "pair": c.pair,
                "mode": c.mode.value,
                "radius_m": c.radius_m,
                "status": c.status.value,
                "length_m": c.length_m,
                "exposure_m": c.exposure_m,
                "gap_origin_m": c.gap_origin_m,
                "gap_destination_m": c.gap_destination_m,
                "overhead": c.overhead,
                "overhead_vs_baseline": c.overhead_vs_baseline,
                "rendered": None if c.status is RouteStatus.NO_ROUTE else render_distance(c.length_m),
            })
    averages = []
    for mode, radius in report.spec.modes:
        a = report.averages[(mode, radius)]
        averages.append({
            "mode": a.mode.value,
            "radius_m": a.radius_m,
            "mean_length_m": a.mean_length_m,
            "rendered": None if a.mean_length_m is None else render_distance(a.mean_length_m),
            "factor": a.factor,
            "included": a.included,
            "excluded": a.excluded,
        })
    return {
        "config": report.config,
        "pairs": [p.name for p in report.spec.pairs],
        "modes": [{"mode": m.value, "radius_m": r} for m, r in report.spec.modes],
        "cells": cells,
        "averages": averages,
    }


def cell_geojson(report: ExperimentReport, pair: str, mode: Mode, radius_m: float) -> dict[str, Any] | None:
    """One cell's route polyline as a GeoJSON feature, None for NoRoute."""
    cell = report.cells[(pair, mode, radius_m)]
    if cell.status is RouteStatus.NO_ROUTE or not cell.polyline:
        return None
    coords = [[p.lon, p.lat] for p in cell.polyline]
    geometry: dict[str, Any]
    if len(coords) == 1:
        geometry = {"type": "Point", "coordinates": coords[0]}
    else:
        geometry = {"type": "LineString", "coordinates": coords}
    return {
        "type": "Feature",
        "geometry": geometry,
        "properties": {
            "pair": pair,
            "mode": mode.value,
            "radius_m": radius_m,
            "status": cell.status.value,
            "length_m": cell.length_m,
            "exposure_m": cell.exposure_m,
        },
    }


def render_table(report: ExperimentReport) -> str:
    """Aligned text table with footnote markers.

    "*" marks truncated cells, "+" marks pairs routed through via points,
    "no route" cells are excluded from the column averages.
    """
    headers = ["pair"] + [f"{m.value} {r:g}m" for m, r in report.spec.modes]
    rows: list[list[str]] = []
    any_truncated = False
    any_via = False
    any_noroute = False
    for pair in report.spec.pairs:
        label = pair.name
        if pair.via:
            label += "+"
            any_via = True
        row = [label]
        for mode, radius in report.spec.modes:
            c = report.cells[(pair.name, mode, radius)]
            if c.status is RouteStatus.NO_ROUTE:
                row.append("no route")
                any_noroute = True
                continue
            text = render_distance(c.length_m)
            if c.overhead is not None:
                text += f" ({render_overhead(c.overhead)})"
            if c.status is RouteStatus.TRUNCATED:
                text += "*"
                any_truncated = True
            row.append(text)
        rows.append(row)

    avg_row = ["average"]
    for mode, radius in report.spec.modes:
        a = report.averages[(mode, radius)]
        if a.mean_length_m is None:
            avg_row.append("no route")
            continue
        text = render_distance(a.mean_length_m)
        if a.factor is not None:
            text += f" ({render_overhead(a.factor)})"
        avg_row.append(text)
    rows.append(avg_row)

    widths = [max(len(headers[i]), *(len(r[i]) for r in rows)) for i in range(len(headers))]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for row in rows[:-1]:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    lines.append("  ".join("-" * w for w in widths))
    lines.append("  ".join(c.ljust(w) for c, w in zip(avg_row, widths)).rstrip())

    notes = []
    if any_truncated:
        notes.append("*  truncated: route ends short of the requested endpoint (gap above the complete threshold)")
    if any_via:
        notes.append("+  pair routed through one or more via points")
    if any_noroute:
        notes.append("no route: nothing acceptable within the endpoint gap limit; such cells are excluded from averages")
    if notes:
        lines.append("")
        lines.extend(notes)
    return "\n".join(lines)
