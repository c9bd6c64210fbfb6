/** Small planar geometry kit for the client-side coverage re-check.
 *
 * Mirrors the service's equirectangular projection so distances the
 * client measures agree with the ones the router optimized, up to
 * coordinate serialization noise (far below the epsilon used here).
 */

import type { LatLon } from "./api.js";

export const EARTH_RADIUS_M = 6371000.0;

const DEG = Math.PI / 180;

export interface XY {
  x: number;
  y: number;
}

/** Local east/north meters around origin (equirectangular, cos at origin). */
export function projectMeters(p: LatLon, origin: LatLon): XY {
  const k = Math.cos(origin.lat * DEG);
  return {
    x: (p.lon - origin.lon) * DEG * EARTH_RADIUS_M * k,
    y: (p.lat - origin.lat) * DEG * EARTH_RADIUS_M,
  };
}

export function unprojectMeters(q: XY, origin: LatLon): LatLon {
  const k = Math.cos(origin.lat * DEG);
  return {
    lat: origin.lat + q.y / EARTH_RADIUS_M / DEG,
    lon: origin.lon + q.x / (EARTH_RADIUS_M * k) / DEG,
  };
}

export function distanceM(a: LatLon, b: LatLon): number {
  const q = projectMeters(b, a);
  return Math.hypot(q.x, q.y);
}

/** Distance from p to segment ab, all in the same planar frame. */
export function pointSegmentDistance(p: XY, a: XY, b: XY): number {
  const abx = b.x - a.x;
  const aby = b.y - a.y;
  const apx = p.x - a.x;
  const apy = p.y - a.y;
  const denom = abx * abx + aby * aby;
  let t = denom > 0 ? (apx * abx + apy * aby) / denom : 0;
  t = Math.max(0, Math.min(1, t));
  return Math.hypot(apx - t * abx, apy - t * aby);
}

/** Smallest distance from the polyline to the disc center, minus the radius.
 *
 * Negative means the line dips inside the disc by that many meters.
 */
export function polylineClearanceM(line: LatLon[], center: LatLon, radiusM: number): number {
  if (line.length === 0) return Infinity;
  const c: XY = { x: 0, y: 0 };
  let best = Infinity;
  let prev = projectMeters(line[0]!, center);
  if (line.length === 1) return Math.hypot(prev.x, prev.y) - radiusM;
  for (let i = 1; i < line.length; i += 1) {
    const cur = projectMeters(line[i]!, center);
    const d = pointSegmentDistance(c, prev, cur);
    if (d < best) best = d;
    prev = cur;
  }
  return best - radiusM;
}

/** True when the polyline enters the disc interior by more than epsM. */
export function polylineIntersectsDisc(
  line: LatLon[],
  center: LatLon,
  radiusM: number,
  epsM = 1e-6,
): boolean {
  return polylineClearanceM(line, center, radiusM) < -epsM;
}

export interface Disc {
  center: LatLon;
  radiusM: number;
}

/** First disc the polyline violates, or null when the line is clean. */
export function firstDiscViolation(line: LatLon[], discs: Disc[], epsM = 1e-6): Disc | null {
  for (const disc of discs) {
    if (polylineIntersectsDisc(line, disc.center, disc.radiusM, epsM)) return disc;
  }
  return null;
}

/** Closed outline for a camera sector: center, arc, back to center.
 *
 * Bearings are compass-style (0 = north, clockwise positive), matching
 * the camera feed's fov properties.
 */
export function wedgeOutline(
  center: LatLon,
  radiusM: number,
  bearingDeg: number,
  angleDeg: number,
  steps = 24,
): LatLon[] {
  const pts: LatLon[] = [{ lat: center.lat, lon: center.lon }];
  const start = bearingDeg - angleDeg / 2;
  for (let i = 0; i <= steps; i += 1) {
    const theta = (start + (angleDeg * i) / steps) * DEG;
    pts.push(
      unprojectMeters({ x: radiusM * Math.sin(theta), y: radiusM * Math.cos(theta) }, center),
    );
  }
  pts.push({ lat: center.lat, lon: center.lon });
  return pts;
}
