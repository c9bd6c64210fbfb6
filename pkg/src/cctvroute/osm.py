"""OpenStreetMap XML ingestion into a pedestrian-routable network.

Keeps only ways a pedestrian may use (highway class whitelist, foot != no,
access != private), drops everything else, and canonicalizes ordering so a
given file always produces the same network.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .geo import GeoPoint, haversine_m

# Highway classes a pedestrian may use. Overridable per parse call.
PEDESTRIAN_HIGHWAYS = frozenset({
    "footway",
    "path",
    "pedestrian",
    "steps",
    "living_street",
    "residential",
    "service",
    "track",
    "unclassified",
    "tertiary",
    "secondary",
    "primary",
    "cycleway",
})


class OsmError(ValueError):
    """Base class for ingestion failures."""


class OsmParseError(OsmError):
    """Malformed XML or a malformed node/way element."""


class NetworkIntegrityError(OsmError):
    """A retained way references a node the file does not define."""


class EmptyNetworkError(OsmError):
    """No pedestrian-usable way survived filtering."""


@dataclass(frozen=True, slots=True)
class OsmNode:
    id: int
    pos: GeoPoint


@dataclass(frozen=True)
class OsmWay:
    """A retained way: ordered node refs plus its original tags."""

    id: int
    node_refs: tuple[int, ...]
    tags: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.node_refs) < 2:
            raise ValueError(f"way {self.id} has fewer than 2 node refs")
        for a, b in zip(self.node_refs, self.node_refs[1:]):
            if a == b:
                raise ValueError(f"way {self.id} repeats node {a} consecutively")


@dataclass(frozen=True)
class PedNetwork:
    """Pedestrian network: nodes by id, ways sorted by id, projection origin.

    The origin is the bounding-box centroid of the retained nodes; all later
    planar work projects against it.
    """

    nodes: dict[int, OsmNode]
    ways: tuple[OsmWay, ...]
    origin: GeoPoint


@dataclass(frozen=True, slots=True)
class NetworkStats:
    node_count: int
    way_count: int
    total_length_m: float


def is_pedestrian(tags: Mapping[str, str], allowed_highways: frozenset[str] = PEDESTRIAN_HIGHWAYS) -> bool:
    """True when the tag set describes a way a pedestrian may walk."""
    if tags.get("highway") not in allowed_highways:
        return False
    if tags.get("foot") == "no":
        return False
    if tags.get("access") == "private":
        return False
    return True


def _require_attr(el: ET.Element, name: str, what: str) -> str:
    val = el.get(name)
    if val is None:
        raise OsmParseError(f"{what} element missing required attribute {name!r}")
    return val


def parse_osm(data: bytes | str, allowed_highways: frozenset[str] = PEDESTRIAN_HIGHWAYS) -> PedNetwork:
    """Parse OSM XML into a PedNetwork.

    Unknown elements and attributes are skipped. Relations are ignored.
    Consecutive duplicate node refs inside a way are collapsed; ways left
    with fewer than two refs are dropped.

    Raises:
        OsmParseError: malformed XML (message carries the line number) or a
            node/way with missing or invalid required attributes.
        NetworkIntegrityError: a retained way references an undefined node.
        EmptyNetworkError: nothing pedestrian-usable remains.
    """
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        line, col = exc.position
        raise OsmParseError(f"malformed OSM XML at line {line}, column {col}: {exc.msg}") from exc

    nodes: dict[int, OsmNode] = {}
    for el in root.findall("node"):
        nid = int(_require_attr(el, "id", "node"))
        if nid in nodes:
            raise NetworkIntegrityError(f"duplicate node id {nid}")
        try:
            pos = GeoPoint(float(_require_attr(el, "lat", "node")),
                           float(_require_attr(el, "lon", "node")))
        except ValueError as exc:
            raise OsmParseError(f"node {nid}: {exc}") from exc
        nodes[nid] = OsmNode(nid, pos)

    ways: list[OsmWay] = []
    seen_way_ids: set[int] = set()
    for el in root.findall("way"):
        wid = int(_require_attr(el, "id", "way"))
        if wid in seen_way_ids:
            raise NetworkIntegrityError(f"duplicate way id {wid}")
        seen_way_ids.add(wid)
        tags = {t.get("k"): t.get("v") for t in el.findall("tag") if t.get("k") is not None}
        if not is_pedestrian(tags, allowed_highways):
            continue
        refs: list[int] = []
        for nd in el.findall("nd"):
            ref = int(_require_attr(nd, "ref", "nd"))
            if refs and refs[-1] == ref:
                continue
            refs.append(ref)
        if len(refs) < 2:
            continue
        for ref in refs:
            if ref not in nodes:
                raise NetworkIntegrityError(f"way {wid} references missing node {ref}")
        ways.append(OsmWay(wid, tuple(refs), tags))

    if not ways:
        raise EmptyNetworkError("no pedestrian-usable ways in input")

    ways.sort(key=lambda w: w.id)
    used = sorted({ref for w in ways for ref in w.node_refs})
    kept = {nid: nodes[nid] for nid in used}

    lats = [n.pos.lat for n in kept.values()]
    lons = [n.pos.lon for n in kept.values()]
    origin = GeoPoint((min(lats) + max(lats)) / 2.0, (min(lons) + max(lons)) / 2.0)
    return PedNetwork(nodes=kept, ways=tuple(ways), origin=origin)


def way_length_m(net: PedNetwork, way: OsmWay) -> float:
    return sum(
        haversine_m(net.nodes[a].pos, net.nodes[b].pos)
        for a, b in zip(way.node_refs, way.node_refs[1:])
    )


def network_stats(net: PedNetwork) -> NetworkStats:
    """Node count, way count and total way length (haversine, meters)."""
    total = sum(way_length_m(net, w) for w in net.ways)
    return NetworkStats(len(net.nodes), len(net.ways), total)
