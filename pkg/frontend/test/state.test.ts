import { describe, expect, it } from "vitest";

import type { HealthResponse, RouteRequestBody, RouteResponse } from "../src/api.js";
import {
  addVia,
  applyRoute,
  buildRouteRequest,
  canRequest,
  clearMarkers,
  initialState,
  maybeIssue,
  placeMarker,
  placeNext,
  setBeta,
  setMode,
  setRadius,
  toggleOverlay,
} from "../src/state.js";

const HEALTH: HealthResponse = {
  status: "ok",
  snapshot_id: "abc123",
  build_timestamp: "2026-01-01T00:00:00Z",
  radii: [15, 10, 25],
};

const A = { lat: 62.24, lon: 25.74 };
const B = { lat: 62.241, lon: 25.746 };

describe("initialState", () => {
  it("sorts the radius options from /health and starts on the smallest", () => {
    const s = initialState(HEALTH);
    expect(s.radiusOptions).toEqual([10, 15, 25]);
    expect(s.radiusM).toBe(10);
    expect(s.mode).toBe("privacy");
    expect(s.origin).toBeNull();
    expect(s.destination).toBeNull();
  });

  it("refuses a service with no prebuilt radii", () => {
    expect(() => initialState({ ...HEALTH, radii: [] })).toThrow(/radii/);
  });
});

describe("request gating", () => {
  it("does not build a request until both endpoints are set", () => {
    let s = initialState(HEALTH);
    expect(canRequest(s)).toBe(false);
    expect(buildRouteRequest(s)).toBeNull();
    s = placeMarker(s, "origin", A);
    expect(canRequest(s)).toBe(false);
    expect(buildRouteRequest(s)).toBeNull();
    s = placeMarker(s, "destination", B);
    expect(canRequest(s)).toBe(true);
    expect(buildRouteRequest(s)).not.toBeNull();
  });

  it("places origin, then destination, then via points on successive clicks", () => {
    let s = initialState(HEALTH);
    s = placeNext(s, A);
    expect(s.origin).toEqual(A);
    s = placeNext(s, B);
    expect(s.destination).toEqual(B);
    const C = { lat: 62.2405, lon: 25.743 };
    s = placeNext(s, C);
    expect(s.via).toEqual([C]);
  });
});

describe("buildRouteRequest", () => {
  function ready() {
    return placeMarker(placeMarker(initialState(HEALTH), "origin", A), "destination", B);
  }

  it("is a pure function of the state", () => {
    const s1 = ready();
    const s2 = ready();
    const b1 = buildRouteRequest(s1);
    const b2 = buildRouteRequest(s2);
    expect(b1).toEqual(b2);
    expect(JSON.stringify(b1)).toBe(JSON.stringify(b2));
    // calling it twice on the same state changes nothing
    expect(JSON.stringify(buildRouteRequest(s1))).toBe(JSON.stringify(b1));
    expect(s1).toEqual(s2);
  });

  it("mirrors mode, radius and via points into the body", () => {
    let s = ready();
    s = setMode(s, "baseline");
    s = setRadius(s, 25);
    const C = { lat: 62.2402, lon: 25.741 };
    s = addVia(s, C);
    const body = buildRouteRequest(s);
    expect(body).toEqual({
      origin: A,
      destination: B,
      mode: "baseline",
      radius_m: 25,
      via: [C],
    });
  });

  it("sends beta only in safety mode", () => {
    const s = ready();
    expect(buildRouteRequest(s)).not.toHaveProperty("beta");
    const safety = setMode(s, "safety");
    expect(buildRouteRequest(safety)).toHaveProperty("beta", 0.25);
    const tuned = setBeta(safety, 0.5);
    expect(buildRouteRequest(tuned)).toHaveProperty("beta", 0.5);
  });

  it("ignores radii the service did not announce and out-of-range betas", () => {
    const s = ready();
    expect(setRadius(s, 12).radiusM).toBe(s.radiusM);
    expect(setRadius(s, 25).radiusM).toBe(25);
    expect(setBeta(s, 0).beta).toBe(s.beta);
    expect(setBeta(s, 1.5).beta).toBe(s.beta);
  });
});

describe("maybeIssue", () => {
  function ready() {
    return placeMarker(placeMarker(initialState(HEALTH), "origin", A), "destination", B);
  }

  function log() {
    const bodies: RouteRequestBody[] = [];
    return { bodies, issue: (b: RouteRequestBody) => bodies.push(b) };
  }

  it("stays quiet while endpoints are missing", () => {
    const { bodies, issue } = log();
    const s0 = initialState(HEALTH);
    const s1 = placeMarker(s0, "origin", A);
    expect(maybeIssue(s0, s1, issue)).toBe(false);
    expect(bodies).toHaveLength(0);
  });

  it("fires once the second endpoint lands", () => {
    const { bodies, issue } = log();
    const s0 = placeMarker(initialState(HEALTH), "origin", A);
    const s1 = placeMarker(s0, "destination", B);
    expect(maybeIssue(s0, s1, issue)).toBe(true);
    expect(bodies).toHaveLength(1);
    expect(bodies[0]!.destination).toEqual(B);
  });

  it("re-issues on every selector change that alters the request", () => {
    const { bodies, issue } = log();
    let s = ready();
    maybeIssue(null, s, issue);
    let prev = s;
    s = setRadius(s, 15);
    expect(maybeIssue(prev, s, issue)).toBe(true);
    prev = s;
    s = setMode(s, "safety");
    expect(maybeIssue(prev, s, issue)).toBe(true);
    prev = s;
    s = setBeta(s, 0.75);
    expect(maybeIssue(prev, s, issue)).toBe(true);
    expect(bodies.map((b) => [b.mode, b.radius_m, b.beta ?? null])).toEqual([
      ["privacy", 10, null],
      ["privacy", 15, null],
      ["safety", 15, 0.25],
      ["safety", 15, 0.75],
    ]);
  });

  it("stays quiet for changes that do not alter the request", () => {
    const { bodies, issue } = log();
    const s = ready();
    maybeIssue(null, s, issue);
    expect(maybeIssue(s, toggleOverlay(s), issue)).toBe(false);
    expect(maybeIssue(s, setRadius(s, 10), issue)).toBe(false);
    const fakeRoute = { status: "complete" } as RouteResponse;
    expect(maybeIssue(s, applyRoute(s, fakeRoute), issue)).toBe(false);
    expect(bodies).toHaveLength(1);
  });

  it("goes back to quiet after markers are cleared", () => {
    const { bodies, issue } = log();
    const s = ready();
    maybeIssue(null, s, issue);
    const cleared = clearMarkers(s);
    expect(maybeIssue(s, cleared, issue)).toBe(false);
    expect(cleared.lastRoute).toBeNull();
    expect(bodies).toHaveLength(1);
  });
});
