import { describe, expect, it } from "vitest";

import { countElements, renderDiagram } from "../src/render.js";
import { axisLabel, renderChart } from "../src/chart.js";
import type { DiagramResponse, SeriesPayload } from "../src/types.js";

function diagram(): DiagramResponse {
  return {
    schema: "hfv-diagram/1",
    units: { temp: "K", power: "W" },
    timestep: 0,
    layout_kind: "circular",
    boxes: [
      {
        name: "A",
        center: [1, 0],
        width: 80,
        height: 54,
        fill_class: "excess_outgoing",
        label_lines: ["A", "300 K", "-20.0 W"],
      },
      {
        name: "B",
        center: [-1, 0],
        width: 80,
        height: 54,
        fill_class: "excess_incoming",
        label_lines: ["B", "290 K", "20.0 W"],
      },
    ],
    arrows: [
      {
        from: "A",
        to: "B",
        kind: "linear",
        q_label: "20.0 W",
        g_label: "[2.00 W/K]",
        color: 0.5,
        weight: 2.5,
        dashed: false,
        q_watts: 20,
      },
      {
        from: "B",
        to: "A",
        kind: "radiative",
        q_label: "1.00 W",
        g_label: null,
        color: 0,
        weight: 1,
        dashed: true,
        q_watts: 1,
      },
    ],
    meta: { max_radiative_q: 1 },
  };
}

describe("renderDiagram", () => {
  it("emits one rect per box and one line per arrow", () => {
    const counts = countElements(renderDiagram(diagram()));
    expect(counts.boxes).toBe(2);
    expect(counts.arrows).toBe(2);
    expect(counts.dashed).toBe(1);
  });

  it("uses the class fill colors and dash pattern", () => {
    const markup = renderDiagram(diagram());
    expect(markup).toContain("#606060");
    expect(markup).toContain("#CC3333");
    expect(markup).toContain('stroke-dasharray="6 4"');
  });

  it("renders every label line as text", () => {
    const markup = renderDiagram(diagram());
    expect((markup.match(/<text /g) ?? []).length).toBe(6);
    expect(markup).toContain("-20.0 W");
  });

  it("escapes markup in names and labels", () => {
    const d = diagram();
    d.boxes[0].label_lines[0] = "<evil>";
    const markup = renderDiagram(d);
    expect(markup).toContain("&lt;evil&gt;");
    expect(markup).not.toContain("<evil>");
  });

  it("handles an empty diagram", () => {
    const d = diagram();
    d.boxes = [];
    d.arrows = [];
    const counts = countElements(renderDiagram(d));
    expect(counts).toEqual({ boxes: 0, arrows: 0, dashed: 0 });
  });
});

describe("renderChart", () => {
  const payload: SeriesPayload = {
    kind: "temperature",
    x: [0, 60, 120],
    labels: ["S000", "S001"],
    y: [
      [300, 301, 302],
      [290, 291, 292],
    ],
    units: { temp: "C", power: "W" },
  };

  it("draws one polyline per series", () => {
    const markup = renderChart(payload);
    expect((markup.match(/<polyline /g) ?? []).length).toBe(2);
    expect(markup).toContain("S001");
  });

  it("labels the axis with the display unit", () => {
    expect(axisLabel(payload)).toBe("Temperature [°C]");
    expect(
      axisLabel({ ...payload, kind: "flow", units: { power: "W" } })
    ).toBe("Heat flow [W]");
  });

  it("survives a single-point series", () => {
    const single: SeriesPayload = {
      kind: "temperature",
      x: [0],
      labels: ["A"],
      y: [[300]],
      units: { temp: "K", power: "W" },
    };
    expect(renderChart(single)).toContain("<polyline");
  });
});
