/** Thin fetch wrapper over the hfv HTTP API. */

import type {
  ApiErrorBody,
  DiagramResponse,
  SeriesPayload,
  Summary,
} from "./types.js";
import type { DiagramRequestBody } from "./state.js";

export class ApiError extends Error {
  constructor(public code: string, message: string) {
    super(message);
  }
}

async function raiseFor(resp: Response): Promise<never> {
  let body: ApiErrorBody | null = null;
  try {
    body = (await resp.json()) as ApiErrorBody;
  } catch {
    // non-JSON error body, fall through
  }
  if (body && body.error) throw new ApiError(body.error, body.message);
  throw new ApiError("http_error", `request failed with status ${resp.status}`);
}

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchFn: typeof fetch = fetch
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const resp = await this.fetchFn(this.baseUrl + path);
    if (!resp.ok) await raiseFor(resp);
    return (await resp.json()) as T;
  }

  summary(): Promise<Summary> {
    return this.getJson("/api/summary");
  }

  async diagram(request: DiagramRequestBody): Promise<DiagramResponse> {
    const resp = await this.fetchFn(this.baseUrl + "/api/diagram", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(request),
    });
    if (!resp.ok) await raiseFor(resp);
    return (await resp.json()) as DiagramResponse;
  }

  temperatureSeries(names: string[], tempUnit: string): Promise<SeriesPayload> {
    const params = new URLSearchParams({
      names: names.join(","),
      units: tempUnit,
    });
    return this.getJson(`/api/transient/temperature?${params}`);
  }

  flowSeries(from: string, to: string): Promise<SeriesPayload> {
    const params = new URLSearchParams({ from, to });
    return this.getJson(`/api/transient/flow?${params}`);
  }

  /** Server-rendered SVG bytes, for byte-stable downloads. */
  async exportSvg(request: DiagramRequestBody): Promise<Uint8Array<ArrayBuffer>> {
    const resp = await this.fetchFn(this.baseUrl + "/api/export", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(request),
    });
    if (!resp.ok) await raiseFor(resp);
    return new Uint8Array(await resp.arrayBuffer());
  }
}
