/** Client-side DiagramSpec rendering as SVG markup.
 *
 * The client draws the diagram itself (rather than embedding the server
 * SVG) so boxes and arrows remain addressable for hover highlights.
 * Structure is kept parallel to the server renderer: one <rect> per box
 * and one <line> per arrow, dashed "6 4" for radiative flows.
 */

import type { DiagramArrow, DiagramBox, DiagramResponse } from "./types.js";

const FILL_COLORS: Record<string, string> = {
  neutral: "#D3D3D3",
  excess_outgoing: "#606060",
  excess_incoming: "#CC3333",
};

const EDGE_LOW = [0x1f, 0x4f, 0xcc];
const EDGE_HIGH = [0xcc, 0x1f, 0x1f];

function lerpColor(scalar: number): string {
  const channel = (i: number) =>
    Math.round(EDGE_LOW[i] + (EDGE_HIGH[i] - EDGE_LOW[i]) * scalar);
  const hex = (v: number) => v.toString(16).padStart(2, "0");
  return `#${hex(channel(0))}${hex(channel(1))}${hex(channel(2))}`;
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

interface Transform {
  x(v: number): number;
  y(v: number): number;
}

function fitTransform(
  boxes: DiagramBox[],
  width: number,
  height: number
): Transform {
  const marginX = 0.05 * width;
  const marginY = 0.05 * height;
  const xs = boxes.map((b) => b.center[0]);
  const ys = boxes.map((b) => b.center[1]);
  const minX = Math.min(...xs, 0);
  const maxX = Math.max(...xs, 0);
  const minY = Math.min(...ys, 0);
  const maxY = Math.max(...ys, 0);
  const spanX = maxX - minX || 1;
  const spanY = maxY - minY || 1;
  return {
    x: (v) => marginX + ((v - minX) / spanX) * (width - 2 * marginX),
    y: (v) => marginY + ((v - minY) / spanY) * (height - 2 * marginY),
  };
}

function arrowMarkup(
  arrow: DiagramArrow,
  centers: Map<string, [number, number]>,
  index: number
): string {
  const from = centers.get(arrow.from);
  const to = centers.get(arrow.to);
  if (!from || !to) return "";
  const stroke = lerpColor(arrow.color);
  const dash = arrow.dashed ? ' stroke-dasharray="6 4"' : "";
  const title = arrow.g_label
    ? `${arrow.q_label} ${arrow.g_label}`
    : arrow.q_label;
  return (
    `<line data-arrow="${index}" x1="${from[0]}" y1="${from[1]}"` +
    ` x2="${to[0]}" y2="${to[1]}" stroke="${stroke}"` +
    ` stroke-width="${arrow.weight}"${dash}>` +
    `<title>${escapeXml(title)}</title></line>`
  );
}

function boxMarkup(box: DiagramBox, t: Transform): string {
  const cx = t.x(box.center[0]);
  const cy = t.y(box.center[1]);
  const x = cx - box.width / 2;
  const y = cy - box.height / 2;
  const fill = FILL_COLORS[box.fill_class] ?? FILL_COLORS.neutral;
  const lines = box.label_lines
    .map(
      (line, i) =>
        `<text x="${cx}" y="${y + 16 + i * 16}" text-anchor="middle"` +
        ` font-size="12">${escapeXml(line)}</text>`
    )
    .join("");
  return (
    `<g data-box="${escapeXml(box.name)}">` +
    `<rect x="${x}" y="${y}" width="${box.width}" height="${box.height}"` +
    ` fill="${fill}" stroke="#222"/>` +
    lines +
    `</g>`
  );
}

export function renderDiagram(
  diagram: DiagramResponse,
  width = 1000,
  height = 700
): string {
  const t = fitTransform(diagram.boxes, width, height);
  const centers = new Map<string, [number, number]>(
    diagram.boxes.map((b) => [b.name, [t.x(b.center[0]), t.y(b.center[1])]])
  );
  const arrows = diagram.arrows
    .map((a, i) => arrowMarkup(a, centers, i))
    .join("");
  const boxes = diagram.boxes.map((b) => boxMarkup(b, t)).join("");
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}"` +
    ` height="${height}" viewBox="0 0 ${width} ${height}">` +
    `<g class="arrows">${arrows}</g><g class="boxes">${boxes}</g></svg>`
  );
}

export interface RenderCounts {
  boxes: number;
  arrows: number;
  dashed: number;
}

/** Element counts of rendered markup, for fidelity checks against the
 * DiagramSpec the markup was built from. */
export function countElements(markup: string): RenderCounts {
  return {
    boxes: (markup.match(/<rect /g) ?? []).length,
    arrows: (markup.match(/<line /g) ?? []).length,
    dashed: (markup.match(/stroke-dasharray="6 4"/g) ?? []).length,
  };
}
