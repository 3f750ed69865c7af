/** Browser entry point: wires the store to the DOM panels. */

import { DispatchApi } from "./api";
import { projectPoints, renderMapSvg } from "./mapView";
import { renderQueue, renderQueueTable, formatMinutes } from "./queueView";
import { ConsoleStore, ViewState } from "./store";
import { scaleWeightsRequest, extraUnitsRequest } from "./whatif";

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

function renderBanner(view: ViewState): void {
  const banner = el("banner");
  if (view.stale && view.lastGoodAt !== null) {
    banner.textContent = `stale data — showing snapshot from ` +
      `${new Date(view.lastGoodAt).toLocaleTimeString()} (${view.lastError})`;
    banner.classList.add("stale");
  } else if (view.stale) {
    banner.textContent = `service unreachable (${view.lastError})`;
    banner.classList.add("stale");
  } else {
    banner.textContent = "";
    banner.classList.remove("stale");
  }
}

function renderUnits(view: ViewState): void {
  const target = el("units");
  if (!view.state) return;
  target.replaceChildren(...view.state.units.map(unit => {
    const li = document.createElement("li");
    li.textContent = `${unit.id} — capacity ${unit.capacity}, ` +
      `available ${formatMinutes(unit.available_at)}`;
    return li;
  }));
}

function renderWeights(view: ViewState, store: ConsoleStore, api: DispatchApi): void {
  const panel = el("weights");
  if (!view.state || panel.childElementCount > 0) return;
  const weights = view.state.weights;
  const groups: [string, Record<string, number>][] = [
    ["labels", weights.labels],
    ["env", weights.env],
  ];
  for (const [group, table] of groups) {
    for (const [name, value] of Object.entries(table)) {
      const label = document.createElement("label");
      label.textContent = `${group}.${name}`;
      const slider = document.createElement("input");
      slider.type = "range";
      slider.min = "0";
      slider.max = "5";
      slider.step = "0.1";
      slider.value = String(value);
      slider.addEventListener("change", () => {
        const next = structuredClone(weights);
        (group === "labels" ? next.labels : next.env)[name] =
          Number(slider.value);
        void api.putWeights(next).then(() => store.poll());
      });
      label.appendChild(slider);
      panel.appendChild(label);
    }
  }
}

function renderWhatIf(view: ViewState): void {
  const target = el("whatif-result");
  const diff = view.pendingWhatIf;
  if (!diff) {
    target.textContent = "";
    return;
  }
  if (diff.empty) {
    target.textContent = "no change";
    return;
  }
  const lines = [
    `order changed: ${diff.orderChanged ? "yes" : "no"}`,
    `mean wait delta: ${diff.meanWaitDelta.toFixed(1)} min`,
    ...diff.perTask
      .filter(d => d.waitingDelta !== null && d.waitingDelta !== 0)
      .map(d => `${d.taskId}: waiting ${d.waitingBefore} -> ${d.waitingAfter}`),
  ];
  target.replaceChildren(...lines.map(text => {
    const row = document.createElement("div");
    row.textContent = text;
    return row;
  }));
}

export function boot(baseUrl = ""): () => void {
  const api = new DispatchApi(baseUrl);
  const store = new ConsoleStore(api);

  store.subscribe(view => {
    renderBanner(view);
    if (view.schedule) {
      renderQueueTable(el("queue"), renderQueue(view.schedule));
      el("summary").textContent =
        `mean wait ${view.schedule.summary.mean_wait_min.toFixed(1)} min, ` +
        `mean turnaround ${view.schedule.summary.mean_turnaround_min.toFixed(1)} min`;
    }
    if (view.state) {
      renderUnits(view);
      renderWeights(view, store, api);
      el("map").innerHTML = renderMapSvg(projectPoints(view.state));
    }
    if (view.metrics) {
      el("metrics").textContent =
        `${view.metrics.completed} completed, ` +
        `mean wait ${view.metrics.mean_wait_min.toFixed(1)} min`;
    }
    renderWhatIf(view);
  });

  el("whatif-double").addEventListener("click", () => {
    void store.preview(scaleWeightsRequest(2.0));
  });
  el("whatif-extra-unit").addEventListener("click", () => {
    const now = store.current().schedule?.now ?? 0;
    void store.preview(extraUnitsRequest(1, now));
  });
  el("whatif-discard").addEventListener("click", () => store.discardPreview());
  el("dispatch-next").addEventListener("click", () => {
    void api.dispatchNext().then(() => store.poll());
  });

  return store.startPolling();
}

if (typeof document !== "undefined" && document.getElementById("queue")) {
  boot();
}
