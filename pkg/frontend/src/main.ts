/** Entry point: wires the DOM, the map, and the service client together.
 *
 * Data flow is one-directional. DOM events apply a pure reducer to get
 * the next UiState; maybeIssue decides whether that state calls for a
 * new /route request; responses come back through RouteIssuer (latest
 * wins) and land in the state, after which everything re-renders.
 */

import "leaflet/dist/leaflet.css";

import { ApiClient, CameraLoader, RouteIssuer } from "./api.js";
import type { CameraCollection, RouteMode, RouteOutcome } from "./api.js";
import * as st from "./state.js";
import type { UiState } from "./state.js";
import { MapView } from "./map.js";
import { bannerFor, invalidRequestView, statsFor } from "./view.js";
import type { StatsView } from "./view.js";

function must<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (el === null) throw new Error(`missing #${id}`);
  return el as T;
}

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("api") ?? `http://${window.location.hostname || "localhost"}:8000`;

const client = new ApiClient(baseUrl);

const modeSel = must<HTMLSelectElement>("mode");
const radiusSel = must<HTMLSelectElement>("radius");
const betaInput = must<HTMLInputElement>("beta");
const betaRow = must<HTMLElement>("beta-row");
const betaValue = must<HTMLElement>("beta-value");
const overlayBox = must<HTMLInputElement>("overlay");
const clearBtn = must<HTMLButtonElement>("clear");
const statsEl = must<HTMLElement>("stats");
const noticeEl = must<HTMLElement>("notice");
const bannerEl = must<HTMLElement>("banner");
const retryBtn = must<HTMLButtonElement>("retry");
const datasetEl = must<HTMLElement>("dataset");

let state: UiState | null = null;
let cameras: CameraCollection | null = null;
let panelOverride: StatsView | null = null;

const mapView = new MapView(must<HTMLElement>("map"), {
  onClick(p) {
    update((s) => st.placeNext(s, p));
  },
  onViewChanged(bbox) {
    void loader.load(bbox);
  },
});

const issuer = new RouteIssuer(client, onRouteOutcome);

const loader = new CameraLoader(
  client,
  (cams) => {
    cameras = cams;
    mapView.fitOnce(cams.features.map((f) => ({ lat: f.geometry.coordinates[1], lon: f.geometry.coordinates[0] })));
    render();
  },
  () => showBanner("Routing service unreachable. Check the backend, then retry."),
);

function onRouteOutcome(outcome: RouteOutcome): void {
  if (state === null) return;
  if (outcome.kind === "result") {
    panelOverride = null;
    state = st.applyRoute(state, outcome.result);
  } else if (outcome.kind === "invalid") {
    panelOverride = invalidRequestView(outcome.message);
    state = st.applyRoute(state, null);
  } else {
    showBanner(bannerFor(outcome) ?? "Routing service unreachable.");
  }
  render();
}

function update(reduce: (s: UiState) => UiState): void {
  if (state === null) return;
  const prev = state;
  state = reduce(prev);
  if (st.maybeIssue(prev, state, (body) => issuer.issue(body))) {
    panelOverride = null;
  }
  render();
}

function showBanner(text: string): void {
  bannerEl.classList.remove("hidden");
  must<HTMLElement>("banner-text").textContent = text;
}

function hideBanner(): void {
  bannerEl.classList.add("hidden");
}

function renderStats(view: StatsView): void {
  statsEl.replaceChildren(
    ...view.rows.flatMap(([label, value]) => {
      const dt = document.createElement("dt");
      dt.textContent = label;
      const dd = document.createElement("dd");
      dd.textContent = value;
      return [dt, dd];
    }),
  );
  noticeEl.textContent = view.notice ?? "";
  noticeEl.dataset.tone = view.tone;
}

function render(): void {
  if (state === null) return;
  renderStats(panelOverride ?? statsFor(state.lastRoute));
  mapView.renderCameras(cameras, state.radiusM, state.cameraOverlay);
  mapView.renderMarkers(state.origin, state.destination, state.via);
  mapView.renderRoute(state.lastRoute, state.destination);
  betaRow.classList.toggle("hidden", state.mode !== "safety");
  betaValue.textContent = state.beta.toFixed(2);
}

function bindControls(): void {
  modeSel.addEventListener("change", () => update((s) => st.setMode(s, modeSel.value as RouteMode)));
  radiusSel.addEventListener("change", () => update((s) => st.setRadius(s, Number(radiusSel.value))));
  betaInput.addEventListener("change", () => update((s) => st.setBeta(s, Number(betaInput.value))));
  overlayBox.addEventListener("change", () => update((s) => st.toggleOverlay(s)));
  clearBtn.addEventListener("click", () => {
    panelOverride = null;
    update((s) => st.clearMarkers(s));
  });
  retryBtn.addEventListener("click", () => void boot());
}

async function boot(): Promise<void> {
  hideBanner();
  try {
    const health = await client.health();
    state = st.initialState(health);
    datasetEl.textContent = `dataset ${health.snapshot_id}`;
    radiusSel.replaceChildren(
      ...state.radiusOptions.map((r) => {
        const opt = document.createElement("option");
        opt.value = String(r);
        opt.textContent = `${r} m`;
        return opt;
      }),
    );
    radiusSel.value = String(state.radiusM);
    modeSel.value = state.mode;
    overlayBox.checked = state.cameraOverlay;
    betaInput.value = String(state.beta);
    render();
    await loader.load([-180, -85, 180, 85]);
    // after the initial world query, pans and zooms refetch by viewport
  } catch (err) {
    showBanner("Routing service unreachable. Check the backend, then retry.");
  }
}

bindControls();
void boot();
