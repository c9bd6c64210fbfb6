/** Typed client for the routing service HTTP API.
 *
 * The client is the only place the UI talks to the backend; everything
 * else works on the parsed responses. fetch is injectable for tests.
 */

export interface LatLon {
  lat: number;
  lon: number;
}

export interface HealthResponse {
  status: string;
  snapshot_id: string;
  build_timestamp: string;
  radii: number[];
}

export type RouteStatus = "complete" | "truncated" | "no_route";

export type RouteMode = "privacy" | "safety" | "baseline";

export interface PolylineFeature {
  type: "Feature";
  geometry:
    | { type: "LineString"; coordinates: [number, number][] }
    | { type: "Point"; coordinates: [number, number] };
  properties: Record<string, unknown>;
}

export interface RouteResponse {
  status: RouteStatus;
  mode: RouteMode;
  radius_m: number;
  length_m: number;
  exposure_m: number;
  gap_origin_m: number;
  gap_destination_m: number;
  overhead_vs_baseline: number | null;
  polyline: PolylineFeature | null;
}

export type FovSpec = "omni" | { bearing_deg: number; angle_deg: number };

export interface CameraFeature {
  type: "Feature";
  geometry: { type: "Point"; coordinates: [number, number] };
  properties: {
    id: string;
    fov: FovSpec;
    /** effective radius per prebuilt radius, keyed by its short form ("10") */
    effective_radius_m: Record<string, number>;
    [k: string]: unknown;
  };
}

export interface CameraCollection {
  type: "FeatureCollection";
  features: CameraFeature[];
}

export interface RouteRequestBody {
  origin: LatLon;
  destination: LatLon;
  mode: RouteMode;
  radius_m: number;
  via?: LatLon[];
  beta?: number;
}

export interface ApiErrorBody {
  error: string;
  [k: string]: unknown;
}

/** Non-2xx answer that still carried a JSON body. */
export class ServiceError extends Error {
  constructor(readonly status: number, readonly body: ApiErrorBody) {
    super(body.error ?? `HTTP ${status}`);
    this.name = "ServiceError";
  }
}

export type BBox = [west: number, south: number, east: number, north: number];

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

async function parseOrThrow<T>(resp: Response): Promise<T> {
  let body: unknown = null;
  try {
    body = await resp.json();
  } catch {
    // fall through: a non-JSON body on error still raises ServiceError
  }
  if (!resp.ok) {
    const err = (body ?? { error: `HTTP ${resp.status}` }) as ApiErrorBody;
    throw new ServiceError(resp.status, err);
  }
  return body as T;
}

export class ApiClient {
  private readonly fetchFn: FetchLike;

  constructor(readonly baseUrl: string, fetchFn?: FetchLike) {
    // bind the global: browsers require fetch to be called on the window
    this.fetchFn = fetchFn ?? ((url, init) => globalThis.fetch(url, init));
  }

  async health(): Promise<HealthResponse> {
    return parseOrThrow(await this.fetchFn(`${this.baseUrl}/health`));
  }

  async cameras(bbox: BBox): Promise<CameraCollection> {
    const q = bbox.join(",");
    return parseOrThrow(await this.fetchFn(`${this.baseUrl}/cameras?bbox=${q}`));
  }

  async route(body: RouteRequestBody, signal?: AbortSignal): Promise<RouteResponse> {
    const resp = await this.fetchFn(`${this.baseUrl}/route`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
    return parseOrThrow(resp);
  }
}

/** What a finished route request means for the UI. */
export type RouteOutcome =
  | { kind: "result"; result: RouteResponse }
  | { kind: "invalid"; message: string }
  | { kind: "unreachable"; message: string };

/** Serializes route requests: one in flight, latest wins.
 *
 * Every issue() aborts the previous request; a response (or failure)
 * belonging to anything but the most recent issue is dropped, so rapid
 * selector changes can never paint a stale route over a fresh one.
 */
export class RouteIssuer {
  private seq = 0;
  private controller: AbortController | null = null;

  constructor(
    private readonly client: ApiClient,
    private readonly apply: (outcome: RouteOutcome) => void,
  ) {}

  /** Returns the request's sequence number (mostly for tests). */
  issue(body: RouteRequestBody): number {
    const mySeq = ++this.seq;
    this.controller?.abort();
    const controller = new AbortController();
    this.controller = controller;
    this.client.route(body, controller.signal).then(
      (result) => {
        if (mySeq === this.seq) this.apply({ kind: "result", result });
      },
      (err: unknown) => {
        if (mySeq !== this.seq) return; // superseded: stale failures are noise
        if (err instanceof ServiceError && err.status === 400) {
          this.apply({ kind: "invalid", message: err.body.error });
        } else if ((err as Error | null)?.name === "AbortError") {
          // externally aborted while still current: nothing to paint
        } else {
          this.apply({ kind: "unreachable", message: String((err as Error | null)?.message ?? err) });
        }
      },
    );
    return mySeq;
  }
}

/** Fetches cameras per viewport, skipping refetches of the same bbox. */
export class CameraLoader {
  requestCount = 0;
  private lastKey: string | null = null;

  constructor(
    private readonly client: ApiClient,
    private readonly apply: (cams: CameraCollection) => void,
    private readonly onError?: (err: unknown) => void,
  ) {}

  async load(bbox: BBox, force = false): Promise<boolean> {
    const key = bbox.map((v) => v.toFixed(6)).join(",");
    if (!force && key === this.lastKey) return false;
    this.lastKey = key;
    this.requestCount += 1;
    try {
      this.apply(await this.client.cameras(bbox));
      return true;
    } catch (err) {
      this.lastKey = null; // a failed view should be retried on the next pan
      this.onError?.(err);
      return false;
    }
  }
}
