/** Browser bootstrap: wires the controls to the API client and keeps
 * the rendered diagram in sync with the view state. */

import { ApiClient, ApiError } from "./api.js";
import { DiagramScheduler } from "./debounce.js";
import { renderChart } from "./chart.js";
import { renderDiagram } from "./render.js";
import {
  Action,
  LAYOUT_KINDS,
  LayoutKind,
  ViewState,
  effectiveNames,
  exportFilename,
  initialState,
  reduce,
  toRequest,
  validate,
} from "./state.js";
import type { DiagramResponse, Summary } from "./types.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

async function start(): Promise<void> {
  const api = new ApiClient("");
  const summary: Summary = await api.summary();
  let state: ViewState = initialState();
  let sliderMax = 1;

  const diagramHost = el<HTMLDivElement>("diagram");
  const message = el<HTMLDivElement>("message");
  const slider = el<HTMLInputElement>("threshold");
  const sliderValue = el<HTMLSpanElement>("threshold-value");

  const scheduler = new DiagramScheduler<ViewState, DiagramResponse>(
    (s) => api.diagram(toRequest(s)),
    (diagram) => {
      diagramHost.innerHTML = renderDiagram(diagram);
      message.textContent = "";
      sliderMax = Math.max(diagram.meta.max_radiative_q, 1e-9);
      slider.max = String(sliderMax);
    },
    (error) => {
      message.textContent =
        error instanceof ApiError ? error.message : String(error);
    }
  );

  function dispatch(action: Action): void {
    const next = reduce(state, action);
    const problem = validate(next, summary);
    if (problem) {
      message.textContent = problem;
      return;
    }
    state = next;
    renderControls();
    scheduler.schedule(state);
  }

  function renderControls(): void {
    const names = effectiveNames(summary.submodels, state.groups);
    const list = el<HTMLDivElement>("submodels");
    list.innerHTML = "";
    for (const name of names) {
      const label = document.createElement("label");
      const box = document.createElement("input");
      box.type = "checkbox";
      box.checked = state.selected === null || state.selected.includes(name);
      box.addEventListener("change", () =>
        dispatch({ type: "toggleSubmodel", name })
      );
      label.append(box, ` ${name}`);
      list.append(label);
    }
    sliderValue.textContent = `${state.threshold.toFixed(2)} W`;
  }

  const layoutSelect = el<HTMLSelectElement>("layout");
  for (const kind of LAYOUT_KINDS) {
    const option = document.createElement("option");
    option.value = kind;
    option.textContent = kind;
    layoutSelect.append(option);
  }
  layoutSelect.addEventListener("change", () =>
    dispatch({ type: "setLayout", layout: layoutSelect.value as LayoutKind })
  );

  const timestepSelect = el<HTMLSelectElement>("timestep");
  summary.timestamps.forEach((t, i) => {
    const option = document.createElement("option");
    option.value = String(i);
    option.textContent = `${i} (${t} s)`;
    timestepSelect.append(option);
  });
  timestepSelect.addEventListener("change", () =>
    dispatch({ type: "setTimestep", timestep: Number(timestepSelect.value) })
  );

  slider.addEventListener("input", () =>
    dispatch({ type: "setThreshold", value: Number(slider.value) })
  );

  el<HTMLButtonElement>("group-create").addEventListener("click", () => {
    const name = el<HTMLInputElement>("group-name").value.trim();
    const members = el<HTMLInputElement>("group-members")
      .value.split(",")
      .map((m) => m.trim())
      .filter(Boolean);
    if (name && members.length) {
      dispatch({ type: "setGroup", name, members });
    }
  });

  el<HTMLButtonElement>("unit-toggle").addEventListener("click", () =>
    dispatch({
      type: "setTempUnit",
      unit: state.units.temp === "K" ? "C" : "K",
    })
  );

  el<HTMLButtonElement>("export").addEventListener("click", async () => {
    try {
      const bytes = await api.exportSvg(toRequest(state));
      const blob = new Blob([bytes], { type: "image/svg+xml" });
      const link = document.createElement("a");
      link.href = URL.createObjectURL(blob);
      link.download = exportFilename("dataset", state);
      link.click();
      URL.revokeObjectURL(link.href);
    } catch (error) {
      message.textContent =
        error instanceof ApiError ? error.message : String(error);
    }
  });

  el<HTMLButtonElement>("plot-temperature").addEventListener("click", async () => {
    const names = state.selected ?? summary.submodels;
    if (!names.length) return;
    const payload = await api.temperatureSeries(names, state.units.temp);
    el<HTMLDivElement>("chart").innerHTML = renderChart(payload);
  });

  renderControls();
  scheduler.schedule(state);
}

window.addEventListener("DOMContentLoaded", () => {
  void start();
});
