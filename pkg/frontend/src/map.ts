/** Leaflet wiring. Everything here touches the DOM and is exercised in
 * the browser; the logic it delegates to (geometry, view models, state)
 * lives in the DOM-free modules so the test suite can cover it.
 */

import * as L from "leaflet";

import type { BBox, CameraCollection, LatLon, RouteMode, RouteResponse } from "./api.js";
import { wedgeOutline } from "./geometry.js";
import { gapIndicator, routeLatLons } from "./view.js";

const MODE_COLORS: Record<RouteMode, string> = {
  privacy: "#2e7d32",
  safety: "#1565c0",
  baseline: "#616161",
};

const TILE_URL = "https://tile.openstreetmap.org/{z}/{x}/{y}.png";
const TILE_ATTRIBUTION = "&copy; OpenStreetMap contributors";

/** Tile failures before the basemap falls back to the graph dump. */
const TILE_ERROR_LIMIT = 6;

export interface MapCallbacks {
  onClick(p: LatLon): void;
  onViewChanged(bbox: BBox): void;
}

interface GraphDumpFeature {
  geometry: { type: string; coordinates: [number, number][] };
  properties: { covered?: boolean };
}

export class MapView {
  readonly map: L.Map;
  private readonly tiles: L.TileLayer;
  private tileErrors = 0;
  private fallbackStarted = false;
  private positioned = false;

  private readonly graphLayer = L.layerGroup();
  private readonly cameraLayer = L.layerGroup();
  private readonly routeLayer = L.layerGroup();
  private readonly markerLayer = L.layerGroup();

  constructor(
    container: HTMLElement,
    private readonly callbacks: MapCallbacks,
    private readonly graphDumpUrl = "graph.geojson",
  ) {
    this.map = L.map(container, { center: [0, 0], zoom: 2, worldCopyJump: true });
    this.tiles = L.tileLayer(TILE_URL, { maxZoom: 19, attribution: TILE_ATTRIBUTION });
    this.tiles.on("tileerror", () => this.noteTileError());
    this.tiles.addTo(this.map);
    this.graphLayer.addTo(this.map);
    this.cameraLayer.addTo(this.map);
    this.routeLayer.addTo(this.map);
    this.markerLayer.addTo(this.map);
    this.map.on("click", (ev: L.LeafletMouseEvent) => {
      this.callbacks.onClick({ lat: ev.latlng.lat, lon: ev.latlng.lng });
    });
    this.map.on("moveend", () => this.callbacks.onViewChanged(this.viewBBox()));
  }

  viewBBox(): BBox {
    const b = this.map.getBounds();
    return [b.getWest(), b.getSouth(), b.getEast(), b.getNorth()];
  }

  /** Offline deployments ship no tiles; render the ingest graph dump instead. */
  private noteTileError(): void {
    this.tileErrors += 1;
    if (this.tileErrors < TILE_ERROR_LIMIT || this.fallbackStarted) return;
    this.fallbackStarted = true;
    this.map.removeLayer(this.tiles);
    fetch(this.graphDumpUrl)
      .then((r) => (r.ok ? r.json() : Promise.reject(new Error(`HTTP ${r.status}`))))
      .then((dump: { features: GraphDumpFeature[] }) => {
        for (const feat of dump.features) {
          if (feat.geometry.type !== "LineString") continue;
          const pts = feat.geometry.coordinates.map(
            ([lon, lat]) => [lat, lon] as [number, number],
          );
          L.polyline(pts, {
            color: feat.properties.covered ? "#b71c1c" : "#9e9e9e",
            weight: 1.5,
            opacity: 0.8,
            interactive: false,
          }).addTo(this.graphLayer);
        }
      })
      .catch(() => {
        // tiles and dump both unavailable: markers and routes still render
      });
  }

  /** One-time framing on the first data that tells us where the city is. */
  fitOnce(points: LatLon[]): void {
    if (this.positioned || points.length === 0) return;
    this.positioned = true;
    const bounds = L.latLngBounds(points.map((p) => [p.lat, p.lon] as [number, number]));
    this.map.fitBounds(bounds.pad(0.2), { maxZoom: 17 });
  }

  renderCameras(cams: CameraCollection | null, radiusM: number, visible: boolean): void {
    this.cameraLayer.clearLayers();
    if (!visible || cams === null) return;
    const key = String(radiusM);
    for (const feat of cams.features) {
      const [lon, lat] = feat.geometry.coordinates;
      const center: LatLon = { lat, lon };
      const r = feat.properties.effective_radius_m[key] ?? radiusM;
      const style: L.PathOptions = {
        color: "#c62828",
        weight: 1,
        fillColor: "#ef5350",
        fillOpacity: 0.25,
      };
      if (feat.properties.fov === "omni") {
        L.circle([lat, lon], { radius: r, ...style }).addTo(this.cameraLayer);
      } else {
        const outline = wedgeOutline(center, r, feat.properties.fov.bearing_deg, feat.properties.fov.angle_deg);
        L.polygon(outline.map((p) => [p.lat, p.lon] as [number, number]), style).addTo(this.cameraLayer);
      }
      L.circleMarker([lat, lon], {
        radius: 3,
        color: "#b71c1c",
        fillColor: "#b71c1c",
        fillOpacity: 1,
      })
        .bindTooltip(feat.properties.id)
        .addTo(this.cameraLayer);
    }
  }

  renderMarkers(origin: LatLon | null, destination: LatLon | null, via: LatLon[]): void {
    this.markerLayer.clearLayers();
    const put = (p: LatLon, color: string, label: string) => {
      L.circleMarker([p.lat, p.lon], {
        radius: 7,
        color,
        fillColor: color,
        fillOpacity: 0.9,
        weight: 2,
      })
        .bindTooltip(label)
        .addTo(this.markerLayer);
    };
    if (origin !== null) put(origin, "#1b5e20", "origin");
    via.forEach((p, i) => put(p, "#6a1b9a", `via ${i + 1}`));
    if (destination !== null) put(destination, "#0d47a1", "destination");
  }

  renderRoute(route: RouteResponse | null, destination: LatLon | null): void {
    this.routeLayer.clearLayers();
    if (route === null) return;
    const pts = routeLatLons(route.polyline);
    if (pts.length >= 2) {
      L.polyline(pts.map((p) => [p.lat, p.lon] as [number, number]), {
        color: MODE_COLORS[route.mode] ?? "#333",
        weight: 5,
        opacity: 0.85,
      }).addTo(this.routeLayer);
    } else if (pts.length === 1) {
      const only = pts[0]!;
      L.circleMarker([only.lat, only.lon], { radius: 5, color: MODE_COLORS[route.mode] }).addTo(
        this.routeLayer,
      );
    }
    const gap = gapIndicator(route, destination);
    if (gap !== null) {
      L.polyline(
        [
          [gap.from.lat, gap.from.lon],
          [gap.to.lat, gap.to.lon],
        ],
        { color: "#e65100", weight: 3, dashArray: "6 8", opacity: 0.9 },
      ).addTo(this.routeLayer);
    }
  }
}
