/** Wire types for the hfv HTTP API. */

export interface Summary {
  sizes: {
    num_submodels: number;
    num_nodes: number;
    num_linear: number;
    num_radiative: number;
    num_timesteps: number;
  };
  submodels: string[];
  timestamps: number[];
}

export interface DiagramBox {
  name: string;
  center: [number, number];
  width: number;
  height: number;
  fill_class: string;
  label_lines: string[];
}

export interface DiagramArrow {
  from: string;
  to: string;
  kind: "linear" | "radiative";
  q_label: string;
  g_label: string | null;
  color: number;
  weight: number;
  dashed: boolean;
  q_watts: number;
}

export interface DiagramResponse {
  schema: string;
  units: Record<string, string>;
  timestep: number;
  layout_kind: string;
  boxes: DiagramBox[];
  arrows: DiagramArrow[];
  meta: { max_radiative_q: number };
}

export interface SeriesPayload {
  kind: "temperature" | "flow";
  x: number[];
  labels: string[];
  y: number[][];
  units: Record<string, string>;
  label?: string;
}

export interface ApiErrorBody {
  error: string;
  message: string;
}
