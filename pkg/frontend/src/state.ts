/** View state and its reducer. Mirrors the server's request validity
 * rules so most mistakes are caught before a round trip. */

import type { Summary } from "./types.js";

export type LayoutKind = "circular" | "layered" | "force" | "subspace";

export const LAYOUT_KINDS: LayoutKind[] = [
  "circular",
  "layered",
  "force",
  "subspace",
];

export interface ViewState {
  /** null means "all submodels" (no include filter sent). */
  selected: string[] | null;
  groups: Record<string, string[]>;
  threshold: number;
  layout: LayoutKind;
  timestep: number;
  units: { temp: "K" | "C"; power: "W" };
  seed: number;
}

export function initialState(): ViewState {
  return {
    selected: null,
    groups: {},
    threshold: 0,
    layout: "circular",
    timestep: 0,
    units: { temp: "K", power: "W" },
    seed: 0,
  };
}

export type Action =
  | { type: "toggleSubmodel"; name: string }
  | { type: "selectAll" }
  | { type: "setGroup"; name: string; members: string[] }
  | { type: "removeGroup"; name: string }
  | { type: "setThreshold"; value: number }
  | { type: "setLayout"; layout: LayoutKind }
  | { type: "setTimestep"; timestep: number }
  | { type: "setTempUnit"; unit: "K" | "C" };

/** Submodel names as the server sees them after grouping. */
export function effectiveNames(
  submodels: string[],
  groups: Record<string, string[]>
): string[] {
  const grouped = new Set<string>();
  for (const members of Object.values(groups)) {
    for (const m of members) grouped.add(m);
  }
  const names: string[] = [];
  const emitted = new Set<string>();
  for (const name of submodels) {
    if (!grouped.has(name)) {
      names.push(name);
      continue;
    }
    for (const [gname, members] of Object.entries(groups)) {
      if (members.includes(name) && !emitted.has(gname)) {
        names.push(gname);
        emitted.add(gname);
      }
    }
  }
  return names;
}

export function reduce(state: ViewState, action: Action): ViewState {
  switch (action.type) {
    case "toggleSubmodel": {
      const current = state.selected ?? [];
      const selected = current.includes(action.name)
        ? current.filter((n) => n !== action.name)
        : [...current, action.name];
      return { ...state, selected };
    }
    case "selectAll":
      return { ...state, selected: null };
    case "setGroup": {
      const groups = { ...state.groups, [action.name]: [...action.members] };
      // Grouped-away members are no longer valid selection names; the
      // group name stands in for them.
      let selected = state.selected;
      if (selected !== null) {
        const members = new Set(action.members);
        const kept = selected.filter((n) => !members.has(n));
        if (kept.length < selected.length) kept.push(action.name);
        selected = kept;
      }
      return { ...state, groups, selected };
    }
    case "removeGroup": {
      const groups = { ...state.groups };
      const members = groups[action.name] ?? [];
      delete groups[action.name];
      let selected = state.selected;
      if (selected !== null && selected.includes(action.name)) {
        selected = selected.filter((n) => n !== action.name).concat(members);
      }
      return { ...state, groups, selected };
    }
    case "setThreshold":
      return { ...state, threshold: action.value };
    case "setLayout":
      return { ...state, layout: action.layout };
    case "setTimestep":
      return { ...state, timestep: action.timestep };
    case "setTempUnit":
      return { ...state, units: { ...state.units, temp: action.unit } };
  }
}

/** First problem found, or null when the state is sendable. */
export function validate(state: ViewState, summary: Summary): string | null {
  if (state.threshold < 0) return "threshold must be >= 0";
  if (
    state.timestep < 0 ||
    state.timestep >= summary.sizes.num_timesteps
  ) {
    return `timestep must be in [0, ${summary.sizes.num_timesteps})`;
  }
  if (!LAYOUT_KINDS.includes(state.layout)) {
    return `unknown layout ${state.layout}`;
  }
  const known = new Set(summary.submodels);
  const seen = new Set<string>();
  for (const [gname, members] of Object.entries(state.groups)) {
    if (members.length === 0) return `group ${gname} has no members`;
    for (const m of members) {
      if (!known.has(m)) return `unknown submodel ${m} in group ${gname}`;
      if (seen.has(m)) return `submodel ${m} appears in more than one group`;
      seen.add(m);
    }
  }
  if (state.selected !== null) {
    if (state.selected.length === 0) return "selection is empty";
    const valid = new Set(effectiveNames(summary.submodels, state.groups));
    for (const name of state.selected) {
      if (!valid.has(name)) return `unknown submodel ${name}`;
    }
  }
  return null;
}

export interface DiagramRequestBody {
  timestep: number;
  include: string[] | null;
  groups: Record<string, string[]> | null;
  radiant_threshold: number;
  layout: LayoutKind;
  seed: number;
  units: { temp: "K" | "C"; power: "W" };
}

export function toRequest(state: ViewState): DiagramRequestBody {
  return {
    timestep: state.timestep,
    include: state.selected,
    groups: Object.keys(state.groups).length ? state.groups : null,
    radiant_threshold: state.threshold,
    layout: state.layout,
    seed: state.seed,
    units: state.units,
  };
}

export function exportFilename(dataset: string, state: ViewState): string {
  return `${dataset}_${state.timestep}_${state.layout}.svg`;
}
