import { describe, expect, it } from "vitest";

import type { PolylineFeature, RouteResponse } from "../src/api.js";
import {
  bannerFor,
  formatDistance,
  formatFactor,
  gapIndicator,
  invalidRequestView,
  routeLatLons,
  statsFor,
} from "../src/view.js";

function lineFeature(coords: [number, number][]): PolylineFeature {
  return {
    type: "Feature",
    geometry: { type: "LineString", coordinates: coords },
    properties: {},
  };
}

function completeRoute(over: Partial<RouteResponse> = {}): RouteResponse {
  return {
    status: "complete",
    mode: "privacy",
    radius_m: 10,
    length_m: 1280,
    exposure_m: 0,
    gap_origin_m: 0,
    gap_destination_m: 0,
    overhead_vs_baseline: 1.4999999999,
    polyline: lineFeature([
      [25.7473, 62.2417],
      [25.748, 62.2421],
    ]),
    ...over,
  };
}

describe("formatting", () => {
  it("renders short distances in meters and long ones in kilometers", () => {
    expect(formatDistance(0)).toBe("0 m");
    expect(formatDistance(399.6)).toBe("400 m");
    expect(formatDistance(999.4)).toBe("999 m");
    expect(formatDistance(1280)).toBe("1.28 km");
    expect(formatDistance(4300)).toBe("4.3 km");
    expect(formatDistance(2000)).toBe("2 km");
  });

  it("renders overhead factors with a multiplier and n/a for null", () => {
    expect(formatFactor(1.4999999999)).toBe("1.50x");
    expect(formatFactor(null)).toBe("n/a");
  });
});

describe("statsFor", () => {
  it("prompts for endpoints before any route exists", () => {
    const v = statsFor(null);
    expect(v.rows).toHaveLength(0);
    expect(v.tone).toBe("idle");
    expect(v.notice).toMatch(/origin and a destination/);
  });

  it("shows length, exposure and overhead for a complete route", () => {
    const v = statsFor(completeRoute());
    const rows = Object.fromEntries(v.rows);
    expect(rows["Status"]).toBe("complete");
    expect(rows["Length"]).toBe("1.28 km");
    expect(rows["Exposure"]).toBe("0 m");
    expect(rows["Overhead"]).toBe("1.50x");
    expect(v.notice).toBeNull();
    expect(v.tone).toBe("ok");
  });

  it("shows n/a when the service reports no overhead factor", () => {
    const v = statsFor(completeRoute({ overhead_vs_baseline: null }));
    expect(Object.fromEntries(v.rows)["Overhead"]).toBe("n/a");
  });

  it("explains how far a truncated route falls short", () => {
    const v = statsFor(
      completeRoute({ status: "truncated", gap_destination_m: 60.2 }),
    );
    expect(v.tone).toBe("warn");
    expect(v.notice).toMatch(/ends 60 m short of the destination/);
    expect(Object.fromEntries(v.rows)["Status"]).toBe("truncated");
  });

  it("mentions both gaps when origin and destination are short", () => {
    const v = statsFor(
      completeRoute({ status: "truncated", gap_origin_m: 12, gap_destination_m: 60 }),
    );
    expect(v.notice).toMatch(/starts 12 m from the origin/);
    expect(v.notice).toMatch(/ends 60 m short/);
  });

  it("renders an explicit no-route notice instead of stats", () => {
    const v = statsFor(
      completeRoute({
        status: "no_route",
        length_m: 0,
        polyline: null,
        overhead_vs_baseline: null,
      }),
    );
    expect(v.tone).toBe("error");
    expect(v.notice).toMatch(/^No route:/);
    const labels = v.rows.map(([l]) => l);
    expect(labels).not.toContain("Length");
    expect(Object.fromEntries(v.rows)["Status"]).toBe("no route");
  });
});

describe("invalid request and banner views", () => {
  it("surfaces the service's 400 message inline", () => {
    const v = invalidRequestView("radius_m 12 is not prebuilt");
    expect(v.tone).toBe("error");
    expect(v.notice).toBe("Invalid request: radius_m 12 is not prebuilt");
  });

  it("raises the banner only for unreachable outcomes", () => {
    expect(bannerFor({ kind: "unreachable", message: "fetch failed" })).toMatch(/unreachable/i);
    expect(bannerFor({ kind: "invalid", message: "bad" })).toBeNull();
    expect(bannerFor({ kind: "result", result: completeRoute() })).toBeNull();
    expect(bannerFor(null)).toBeNull();
  });
});

describe("route geometry views", () => {
  it("converts GeoJSON lon/lat order to lat/lon points", () => {
    const pts = routeLatLons(lineFeature([
      [25.7473, 62.2417],
      [25.748, 62.2421],
    ]));
    expect(pts).toEqual([
      { lat: 62.2417, lon: 25.7473 },
      { lat: 62.2421, lon: 25.748 },
    ]);
  });

  it("handles a degenerate single-point geometry and null", () => {
    expect(routeLatLons(null)).toEqual([]);
    const point: PolylineFeature = {
      type: "Feature",
      geometry: { type: "Point", coordinates: [25.7473, 62.2417] },
      properties: {},
    };
    expect(routeLatLons(point)).toEqual([{ lat: 62.2417, lon: 25.7473 }]);
  });

  it("draws the dashed gap from the achieved end to the destination", () => {
    const dest = { lat: 62.25, lon: 25.75 };
    const gap = gapIndicator(
      completeRoute({ status: "truncated", gap_destination_m: 60 }),
      dest,
    );
    expect(gap).not.toBeNull();
    expect(gap!.from).toEqual({ lat: 62.2421, lon: 25.748 });
    expect(gap!.to).toEqual(dest);
  });

  it("omits the gap indicator for complete and no-route results", () => {
    const dest = { lat: 62.25, lon: 25.75 };
    expect(gapIndicator(completeRoute(), dest)).toBeNull();
    expect(gapIndicator(completeRoute({ status: "no_route", polyline: null }), dest)).toBeNull();
    expect(gapIndicator(null, dest)).toBeNull();
  });
});
