/** UI state and the pure state -> request mapping.
 *
 * All transitions return fresh objects; two states that compare equal
 * always serialize to the same request body, which is what lets the
 * controller decide "re-issue or not" by comparing bodies alone.
 */

import type { HealthResponse, LatLon, RouteMode, RouteRequestBody, RouteResponse } from "./api.js";

export interface UiState {
  origin: LatLon | null;
  destination: LatLon | null;
  via: LatLon[];
  mode: RouteMode;
  /** radius options come from /health; radiusM is always one of them */
  radiusOptions: number[];
  radiusM: number;
  beta: number;
  cameraOverlay: boolean;
  lastRoute: RouteResponse | null;
}

export const DEFAULT_BETA = 0.25;

export function initialState(health: HealthResponse): UiState {
  const options = [...health.radii].sort((a, b) => a - b);
  const first = options[0];
  if (first === undefined) throw new Error("service reports no prebuilt radii");
  return {
    origin: null,
    destination: null,
    via: [],
    mode: "privacy",
    radiusOptions: options,
    radiusM: first,
    beta: DEFAULT_BETA,
    cameraOverlay: true,
    lastRoute: null,
  };
}

export function canRequest(s: UiState): boolean {
  return s.origin !== null && s.destination !== null;
}

/** The request the current state calls for, or null while endpoints are unset. */
export function buildRouteRequest(s: UiState): RouteRequestBody | null {
  if (s.origin === null || s.destination === null) return null;
  const body: RouteRequestBody = {
    origin: { lat: s.origin.lat, lon: s.origin.lon },
    destination: { lat: s.destination.lat, lon: s.destination.lon },
    mode: s.mode,
    radius_m: s.radiusM,
  };
  if (s.via.length > 0) body.via = s.via.map((p) => ({ lat: p.lat, lon: p.lon }));
  if (s.mode === "safety") body.beta = s.beta;
  return body;
}

export function placeMarker(s: UiState, which: "origin" | "destination", p: LatLon): UiState {
  return { ...s, [which]: { lat: p.lat, lon: p.lon } };
}

/** Map-click convention: first click sets origin, second destination, later ones via. */
export function placeNext(s: UiState, p: LatLon): UiState {
  if (s.origin === null) return placeMarker(s, "origin", p);
  if (s.destination === null) return placeMarker(s, "destination", p);
  return addVia(s, p);
}

export function addVia(s: UiState, p: LatLon): UiState {
  return { ...s, via: [...s.via, { lat: p.lat, lon: p.lon }] };
}

export function clearVia(s: UiState): UiState {
  return { ...s, via: [] };
}

export function clearMarkers(s: UiState): UiState {
  return { ...s, origin: null, destination: null, via: [], lastRoute: null };
}

export function setMode(s: UiState, mode: RouteMode): UiState {
  return { ...s, mode };
}

/** Ignores radii the service did not prebuild. */
export function setRadius(s: UiState, radiusM: number): UiState {
  if (!s.radiusOptions.includes(radiusM)) return s;
  return { ...s, radiusM };
}

export function setBeta(s: UiState, beta: number): UiState {
  if (!(beta > 0 && beta < 1)) return s;
  return { ...s, beta };
}

export function toggleOverlay(s: UiState): UiState {
  return { ...s, cameraOverlay: !s.cameraOverlay };
}

export function applyRoute(s: UiState, route: RouteResponse | null): UiState {
  return { ...s, lastRoute: route };
}

/** Re-issue policy: fire whenever the state implies a different request.
 *
 * Returns true when a request was issued. Marker moves, mode and radius
 * switches all change the body; overlay toggles and result application
 * do not, so they never cause traffic.
 */
export function maybeIssue(
  prev: UiState | null,
  next: UiState,
  issue: (body: RouteRequestBody) => void,
): boolean {
  const body = buildRouteRequest(next);
  if (body === null) return false;
  const prevBody = prev === null ? null : buildRouteRequest(prev);
  if (prevBody !== null && JSON.stringify(prevBody) === JSON.stringify(body)) return false;
  issue(body);
  return true;
}
