/** Minimal SVG line chart for transient series payloads. */

import type { SeriesPayload } from "./types.js";

const SERIES_COLORS = ["#1F4FCC", "#CC1F1F", "#2E8B57", "#B8860B", "#6A5ACD"];

function scale(
  values: number[],
  outMin: number,
  outMax: number
): (v: number) => number {
  const min = Math.min(...values);
  const max = Math.max(...values);
  const span = max - min || 1;
  return (v) => outMin + ((v - min) / span) * (outMax - outMin);
}

export function axisLabel(payload: SeriesPayload): string {
  if (payload.kind === "temperature") {
    const unit = payload.units["temp"] === "C" ? "°C" : "K";
    return `Temperature [${unit}]`;
  }
  return `Heat flow [${payload.units["power"] ?? "W"}]`;
}

export function renderChart(
  payload: SeriesPayload,
  width = 640,
  height = 360
): string {
  const pad = 48;
  const sx = scale(payload.x, pad, width - pad);
  const allY = payload.y.flat();
  const sy = scale(allY, height - pad, pad); // y grows downward in SVG
  const polylines = payload.y
    .map((series, i) => {
      const points = series
        .map((v, k) => `${sx(payload.x[k])},${sy(v)}`)
        .join(" ");
      const color = SERIES_COLORS[i % SERIES_COLORS.length];
      return `<polyline data-series="${i}" fill="none" stroke="${color}" points="${points}"/>`;
    })
    .join("");
  const legend = payload.labels
    .map(
      (label, i) =>
        `<text x="${pad}" y="${16 + i * 14}" font-size="11"` +
        ` fill="${SERIES_COLORS[i % SERIES_COLORS.length]}">${label}</text>`
    )
    .join("");
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}">` +
    `<line x1="${pad}" y1="${height - pad}" x2="${width - pad}"` +
    ` y2="${height - pad}" stroke="#444"/>` +
    `<line x1="${pad}" y1="${pad}" x2="${pad}" y2="${height - pad}" stroke="#444"/>` +
    `<text x="${width / 2}" y="${height - 8}" text-anchor="middle"` +
    ` font-size="12">Time [s]</text>` +
    `<text x="14" y="${height / 2}" font-size="12"` +
    ` transform="rotate(-90 14 ${height / 2})" text-anchor="middle">` +
    `${axisLabel(payload)}</text>` +
    polylines +
    legend +
    `</svg>`
  );
}
