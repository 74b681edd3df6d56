import { numericColumn, requireColumns, SchemaError, stringColumn, Table } from "./csv.js";
import {
  DEFAULT_MARGIN,
  drawFrame,
  emptyFigure,
  fmt,
  linearScale,
  Scene,
  ticks,
} from "./svg.js";

const SERIES_COLORS = ["#4878a8", "#c44e52"];
const W = 640;
const H = 400;

export type FigureKind = "bar" | "histogram" | "heatmap";

export interface FigureSpec {
  kind: FigureKind;
  input: string;
  output: string;
}

/** Grouped bars with two series (without/with correction).
 *
 * Accepts either of the two CSV contracts of the simulator package:
 *   photons.csv        mode, degree, n_without, n_with, ...
 *   probabilities.csv  config, p_without, p_with, is_ground
 */
export function renderBar(table: Table, path: string): string {
  let labels: string[];
  let series: [number[], number[]];
  let title: string;
  let yLabel: string;
  let highlight: boolean[] | null = null;

  if (table.columns.includes("mode")) {
    requireColumns(table, ["mode", "n_without", "n_with"], path);
    labels = stringColumn(table, "mode").map((m) => `mode ${m}`);
    series = [numericColumn(table, "n_without"), numericColumn(table, "n_with")];
    title = "Final mean photon numbers";
    yLabel = "mean photon number";
  } else {
    requireColumns(table, ["config", "p_without", "p_with"], path);
    labels = stringColumn(table, "config");
    series = [numericColumn(table, "p_without"), numericColumn(table, "p_with")];
    title = "Configuration probabilities";
    yLabel = "probability";
    if (table.columns.includes("is_ground")) {
      highlight = numericColumn(table, "is_ground").map((v) => v > 0);
    }
  }
  if (table.rows.length === 0) {
    return emptyFigure(title, `${path} has no data rows`);
  }

  const yMax = Math.max(...series[0], ...series[1]) * 1.1 || 1;
  const scene = new Scene(W, H);
  const margin = DEFAULT_MARGIN;
  const plotW = W - margin.left - margin.right;
  const plotH = H - margin.top - margin.bottom;
  const y = linearScale([0, yMax], [H - margin.bottom, margin.top]);

  drawFrame(
    scene,
    margin,
    title,
    "",
    yLabel,
    ticks(0, yMax).map((v) => ({ value: v, label: fmt(v) })),
    y
  );

  const groupW = plotW / labels.length;
  const barW = Math.min(24, groupW * 0.35);
  labels.forEach((label, i) => {
    const cx = margin.left + groupW * (i + 0.5);
    series.forEach((vals, s) => {
      const x = cx + (s === 0 ? -barW : 0);
      scene.rect(x, y(vals[i]), barW, H - margin.bottom - y(vals[i]), SERIES_COLORS[s]);
    });
    const bold = highlight !== null && highlight[i];
    scene.text(cx, H - margin.bottom + 16, label, {
      size: 11,
      fill: bold ? "#000" : "#555",
    });
    if (bold) {
      scene.text(cx, H - margin.bottom + 28, "(ground)", { size: 9, fill: "#000" });
    }
  });

  legend(scene, margin.left + 8, margin.top + 6, ["without correction", "with correction"]);
  return scene.render();
}

/** Histogram of per-instance improvement rates on a log10 axis. */
export function renderHistogram(table: Table, path: string): string {
  requireColumns(table, ["improvement_rate"], path);
  const title = "Improvement rate distribution";
  if (table.rows.length === 0) {
    return emptyFigure(title, `${path} has no data rows`);
  }
  const rates = numericColumn(table, "improvement_rate").filter((r) => r > 0);
  const logs = rates.map((r) => Math.log10(r));
  const lo = Math.floor(Math.min(0, ...logs) * 2) / 2;
  const hi = Math.ceil(Math.max(0.5, ...logs) * 2) / 2;
  const nBins = Math.max(1, Math.round((hi - lo) / 0.25));
  const counts = new Array<number>(nBins).fill(0);
  for (const l of logs) {
    const b = Math.min(nBins - 1, Math.floor(((l - lo) / (hi - lo)) * nBins));
    counts[b] += 1;
  }

  const scene = new Scene(W, H);
  const margin = DEFAULT_MARGIN;
  const plotW = W - margin.left - margin.right;
  const yMax = Math.max(...counts) * 1.15;
  const y = linearScale([0, yMax], [H - margin.bottom, margin.top]);
  const x = linearScale([lo, hi], [margin.left, margin.left + plotW]);

  drawFrame(
    scene,
    margin,
    title,
    "improvement rate",
    "instances",
    ticks(0, yMax, 4)
      .filter((v) => Number.isInteger(v))
      .map((v) => ({ value: v, label: String(v) })),
    y
  );

  const binW = plotW / nBins;
  counts.forEach((c, b) => {
    if (c > 0) {
      scene.rect(x(lo + (b * (hi - lo)) / nBins), y(c), binW - 1, y(0) - y(c), SERIES_COLORS[0]);
    }
  });
  for (let e = Math.ceil(lo); e <= hi; e++) {
    scene.text(x(e), H - margin.bottom + 16, e === 0 ? "1" : `1e${e}`, { size: 11 });
    scene.line(x(e), H - margin.bottom, x(e), H - margin.bottom + 4, "#222");
  }
  // rate 1 separates improvement from regression
  scene.line(x(0), margin.top, x(0), H - margin.bottom, "#888");
  return scene.render();
}

/** Mean success probability over the (four-body, coupling) grid. */
export function renderHeatmap(table: Table, path: string): string {
  requireColumns(table, ["four_body", "coupling", "mean_success"], path);
  const title = "Mean success probability";
  if (table.rows.length === 0) {
    return emptyFigure(title, `${path} has no data rows`);
  }
  const cs = numericColumn(table, "four_body");
  const xis = numericColumn(table, "coupling");
  const ps = numericColumn(table, "mean_success");
  const cVals = [...new Set(cs)].sort((a, b) => a - b);
  const xiVals = [...new Set(xis)].sort((a, b) => a - b);

  const scene = new Scene(W, H);
  const margin = { ...DEFAULT_MARGIN, right: 96 };
  const plotW = W - margin.left - margin.right;
  const plotH = H - margin.top - margin.bottom;
  scene.text(W / 2, 20, title, { size: 14 });

  const cellW = plotW / xiVals.length;
  const cellH = plotH / cVals.length;
  for (let i = 0; i < cs.length; i++) {
    const col = xiVals.indexOf(xis[i]);
    const row = cVals.indexOf(cs[i]);
    const x0 = margin.left + col * cellW;
    // larger four-body values on top, like a conventional parameter map
    const y0 = margin.top + (cVals.length - 1 - row) * cellH;
    scene.rect(x0, y0, cellW, cellH, successColor(ps[i]), ' stroke="white"');
    scene.text(x0 + cellW / 2, y0 + cellH / 2 + 4, ps[i].toFixed(2), {
      size: 10,
      fill: ps[i] > 0.6 ? "#fff" : "#222",
    });
  }
  xiVals.forEach((v, col) => {
    scene.text(margin.left + (col + 0.5) * cellW, H - margin.bottom + 16, fmt(v), { size: 11 });
  });
  cVals.forEach((v, row) => {
    const yMid = margin.top + (cVals.length - 1 - row) * cellH + cellH / 2;
    scene.text(margin.left - 8, yMid + 4, fmt(v), { anchor: "end", size: 11 });
  });
  scene.text(W / 2, H - 8, "coupling (xi/K)", { size: 12 });
  scene.text(16, H / 2, "four-body strength (C)", { size: 12, rotate: true });

  // color key
  const keyX = W - margin.right + 20;
  for (let s = 0; s <= 10; s++) {
    const v = s / 10;
    scene.rect(keyX, margin.top + (10 - s) * (plotH / 11), 16, plotH / 11 + 0.5, successColor(v));
  }
  scene.text(keyX + 8, margin.top - 6, "P_s", { size: 11 });
  scene.text(keyX + 24, margin.top + 10, "1", { anchor: "start", size: 10 });
  scene.text(keyX + 24, margin.top + plotH, "0", { anchor: "start", size: 10 });
  return scene.render();
}

function successColor(p: number): string {
  // white -> deep blue, fixed endpoints so equal inputs share a color
  const clamped = Math.max(0, Math.min(1, p));
  const r = Math.round(255 - clamped * (255 - 40));
  const g = Math.round(255 - clamped * (255 - 80));
  const b = Math.round(255 - clamped * (255 - 160));
  return `rgb(${r},${g},${b})`;
}

function legend(scene: Scene, x: number, y: number, names: string[]): void {
  names.forEach((name, s) => {
    scene.rect(x, y + s * 16, 12, 10, SERIES_COLORS[s]);
    scene.text(x + 18, y + s * 16 + 9, name, { anchor: "start", size: 11 });
  });
}

export function render(kind: FigureKind, table: Table, path: string): string {
  switch (kind) {
    case "bar":
      return renderBar(table, path);
    case "histogram":
      return renderHistogram(table, path);
    case "heatmap":
      return renderHeatmap(table, path);
    default:
      throw new SchemaError(`unknown figure kind: ${kind}`);
  }
}
