/** Pure presentation logic: route responses -> panel rows, notices,
 * banner text and overlay geometry. No DOM, so all of it is testable.
 */

import type { LatLon, PolylineFeature, RouteOutcome, RouteResponse } from "./api.js";

export interface StatsView {
  /** label / value pairs for the stats panel */
  rows: [string, string][];
  /** one-line callout under the rows (truncation, no-route, validation) */
  notice: string | null;
  /** styling hook: normal result, degraded result, or input problem */
  tone: "ok" | "warn" | "error" | "idle";
}

export function formatDistance(m: number): string {
  if (!Number.isFinite(m)) return "n/a";
  if (m < 1000) return `${Math.round(m)} m`;
  const km = m / 1000;
  return `${km.toFixed(2).replace(/0+$/, "").replace(/\.$/, "")} km`;
}

export function formatFactor(f: number | null): string {
  return f === null ? "n/a" : `${f.toFixed(2)}x`;
}

const MODE_LABEL: Record<string, string> = {
  privacy: "Privacy",
  safety: "Safety",
  baseline: "Baseline",
};

export function statsFor(route: RouteResponse | null): StatsView {
  if (route === null) {
    return {
      rows: [],
      notice: "Click the map to place an origin and a destination.",
      tone: "idle",
    };
  }
  if (route.status === "no_route") {
    return {
      rows: [
        ["Mode", MODE_LABEL[route.mode] ?? route.mode],
        ["Radius", `${route.radius_m} m`],
        ["Status", "no route"],
      ],
      notice: "No route: nothing on the network is acceptable for these endpoints.",
      tone: "error",
    };
  }
  const rows: [string, string][] = [
    ["Mode", MODE_LABEL[route.mode] ?? route.mode],
    ["Radius", `${route.radius_m} m`],
    ["Status", route.status],
    ["Length", formatDistance(route.length_m)],
    ["Exposure", formatDistance(route.exposure_m)],
    ["Overhead", formatFactor(route.overhead_vs_baseline)],
  ];
  let notice: string | null = null;
  let tone: StatsView["tone"] = "ok";
  if (route.status === "truncated") {
    const gaps: string[] = [];
    if (route.gap_origin_m > 0.005) {
      gaps.push(`starts ${formatDistance(route.gap_origin_m)} from the origin`);
    }
    if (route.gap_destination_m > 0.005) {
      gaps.push(`ends ${formatDistance(route.gap_destination_m)} short of the destination`);
    }
    notice = `Truncated: the route ${gaps.join(" and ")}.`;
    tone = "warn";
  }
  return { rows, notice, tone };
}

/** Inline message for a request the service rejected (HTTP 400). */
export function invalidRequestView(message: string): StatsView {
  return { rows: [], notice: `Invalid request: ${message}`, tone: "error" };
}

/** Banner text when the service cannot be reached at all, else null. */
export function bannerFor(outcome: RouteOutcome | null): string | null {
  if (outcome !== null && outcome.kind === "unreachable") {
    return "Routing service unreachable. Check the backend, then retry.";
  }
  return null;
}

/** Polyline coordinates as LatLon points; [] when there is no geometry. */
export function routeLatLons(polyline: PolylineFeature | null): LatLon[] {
  if (polyline === null) return [];
  const g = polyline.geometry;
  if (g.type === "Point") {
    const [lon, lat] = g.coordinates;
    return [{ lat, lon }];
  }
  return g.coordinates.map(([lon, lat]) => ({ lat, lon }));
}

export interface GapIndicator {
  from: LatLon;
  to: LatLon;
}

/** Dashed connector from the achieved end of a truncated route to the
 * requested destination marker. Null for complete and no-route results.
 */
export function gapIndicator(route: RouteResponse | null, destination: LatLon | null): GapIndicator | null {
  if (route === null || destination === null) return null;
  if (route.status !== "truncated" || route.gap_destination_m <= 0.005) return null;
  const pts = routeLatLons(route.polyline);
  const last = pts[pts.length - 1];
  if (last === undefined) return null;
  return { from: last, to: { lat: destination.lat, lon: destination.lon } };
}
