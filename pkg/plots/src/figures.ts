import { readFileSync } from "fs";

import { numericColumn, readCsv } from "./csv";
import { readFieldDump } from "./fielddump";
import { Figure, colormap, linearScale } from "./svg";

export type FigureKind =
  | "density_trajectories"
  | "convergence"
  | "equivariance"
  | "pair_worldlines";

export const KINDS: FigureKind[] = [
  "density_trajectories",
  "convergence",
  "equivariance",
  "pair_worldlines",
];

const COLORS = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e"];

export interface RenderOptions {
  title?: string;
  width?: number;
  height?: number;
}

/** Space-time |density| heatmap (from a field dump) with overlaid worldlines. */
export function densityTrajectories(inputs: string[], opts: RenderOptions = {}): string {
  const fieldPath = inputs.find((p) => p.endsWith(".txt"));
  if (!fieldPath) {
    throw new Error("density_trajectories needs a field dump (.txt) input");
  }
  const trajPaths = inputs.filter((p) => p !== fieldPath);
  if (trajPaths.length === 0) {
    throw new Error("density_trajectories needs at least one trajectory CSV");
  }
  const field = readFieldDump(fieldPath);
  const fig = new Figure(opts.width ?? 520, opts.height ?? 560, opts.title ?? "space-time density and worldlines");
  const area = fig.plotArea();
  const ctMin = field.c * field.tMin;
  const ctMax = field.c * field.tMax;
  const xs = linearScale([field.zMin, field.zMax], area.x);
  const ys = linearScale([ctMin, ctMax], area.y);

  let mx = 0;
  for (const v of field.barDensity) mx = Math.max(mx, Math.abs(v));
  if (mx === 0) mx = 1;
  const cw = (xs(field.zMax) - xs(field.zMin)) / field.nZ;
  const chRaw = (ys(ctMax) - ys(ctMin)) / field.nT;
  const ch = Math.abs(chRaw);
  for (let it = 0; it < field.nT; it++) {
    const ct0 = ctMin + ((ctMax - ctMin) * it) / field.nT;
    for (let iz = 0; iz < field.nZ; iz++) {
      const z0 = field.zMin + ((field.zMax - field.zMin) * iz) / field.nZ;
      const v = Math.abs(field.barDensity[it * field.nZ + iz]) / mx;
      fig.rect(xs(z0), ys(ct0) - ch, cw + 0.5, ch + 0.5, colormap(v));
    }
  }
  trajPaths.forEach((path, i) => {
    const t = readCsv(path);
    const z = numericColumn(t, "z", path);
    const ct = numericColumn(t, "ct", path);
    fig.polyline(z.map(xs), ct.map(ys), COLORS[i % COLORS.length], 2.0);
  });
  fig.axes(xs, ys, "z", "ct");
  return fig.toString();
}

/** Log-log convergence curves, annotated with the report's fitted orders.
 *
 * The annotated slopes are copied verbatim from the report JSON; nothing is
 * refit here. */
export function convergence(inputs: string[], opts: RenderOptions = {}): string {
  const jsonPath = inputs.find((p) => p.endsWith(".json"));
  const csvPath = inputs.find((p) => p.endsWith(".csv"));
  if (!jsonPath || !csvPath) {
    throw new Error("convergence needs a report JSON and a CSV input");
  }
  let report: Record<string, unknown>;
  try {
    report = JSON.parse(readFileSync(jsonPath, "utf8"));
  } catch {
    throw new Error(`cannot read input file: ${jsonPath}`);
  }
  const table = readCsv(csvPath);
  const hbar = numericColumn(table, table.header[0], csvPath);
  const series = table.header.slice(1);
  if (series.length === 0) {
    throw new Error(`missing data columns in ${csvPath}`);
  }

  const fig = new Figure(opts.width ?? 560, opts.height ?? 440, opts.title ?? "convergence with hbar");
  const area = fig.plotArea();
  const lx = hbar.map(Math.log10);
  const all: number[] = [];
  const logSeries = series.map((name) => {
    const vals = numericColumn(table, name, csvPath).map(Math.log10);
    all.push(...vals.filter(Number.isFinite));
    return vals;
  });
  const xs = linearScale([Math.min(...lx), Math.max(...lx)], area.x);
  const ys = linearScale([Math.min(...all) - 0.3, Math.max(...all) + 0.3], area.y);
  logSeries.forEach((vals, i) => {
    const color = COLORS[i % COLORS.length];
    fig.polyline(lx.map(xs), vals.map(ys), color);
    lx.forEach((x, k) => fig.circle(xs(x), ys(vals[k]), 3, color));
  });
  fig.axes(xs, ys, "log10 hbar", "log10 error");
  fig.legend(series.map((s, i) => [s, COLORS[i % COLORS.length]]), area.x[0] + 10, 52);

  // annotate every fitted order the report carries, exactly as reported
  const annotations: string[] = [];
  for (const [key, value] of Object.entries(report)) {
    if (key.endsWith("_order") && typeof value === "number") {
      annotations.push(`${key.replace(/_/g, " ")} = ${String(value)}`);
    }
  }
  const orders = report["orders"];
  if (orders && typeof orders === "object") {
    for (const [key, value] of Object.entries(orders as Record<string, unknown>)) {
      if (typeof value === "number") {
        annotations.push(`order(${key}) = ${String(value)}`);
      }
    }
  }
  annotations.forEach((a, i) => {
    fig.text(area.x[1] - 8, area.y[1] + 16 + 14 * i, a, { anchor: "end", size: 11, fill: "#444" });
  });
  return fig.toString();
}

/** Empirical advected histogram against the reference density. */
export function equivariance(inputs: string[], opts: RenderOptions = {}): string {
  const csvPath = inputs[0];
  if (!csvPath) {
    throw new Error("equivariance needs a histogram CSV input");
  }
  const t = readCsv(csvPath);
  const zLo = numericColumn(t, "z_lo", csvPath);
  const zHi = numericColumn(t, "z_hi", csvPath);
  const emp = numericColumn(t, "empirical_density", csvPath);
  const ref = numericColumn(t, "reference_density", csvPath);

  const fig = new Figure(opts.width ?? 560, opts.height ?? 420, opts.title ?? "advected samples vs reference density");
  const area = fig.plotArea();
  const xs = linearScale([zLo[0], zHi[zHi.length - 1]], area.x);
  const top = Math.max(...emp, ...ref) * 1.15;
  const ys = linearScale([0, top], area.y);

  // empirical histogram as steps
  const stepX: number[] = [];
  const stepY: number[] = [];
  for (let i = 0; i < emp.length; i++) {
    stepX.push(xs(zLo[i]), xs(zHi[i]));
    stepY.push(ys(emp[i]), ys(emp[i]));
  }
  fig.polyline(stepX, stepY, COLORS[0], 1.6);
  const mid = zLo.map((z, i) => (z + zHi[i]) / 2);
  fig.polyline(mid.map(xs), ref.map(ys), COLORS[1], 2.0);
  fig.axes(xs, ys, "z", "density");
  fig.legend(
    [
      ["empirical (advected)", COLORS[0]],
      ["reference", COLORS[1]],
    ],
    area.x[0] + 10,
    52
  );
  return fig.toString();
}

/** Both particles' worldlines from a pair trajectory CSV. */
export function pairWorldlines(inputs: string[], opts: RenderOptions = {}): string {
  const csvPath = inputs[0];
  if (!csvPath) {
    throw new Error("pair_worldlines needs a pair trajectory CSV input");
  }
  const t = readCsv(csvPath);
  const z1 = numericColumn(t, "z1", csvPath);
  const ct1 = numericColumn(t, "ct1", csvPath);
  const z2 = numericColumn(t, "z2", csvPath);
  const ct2 = numericColumn(t, "ct2", csvPath);

  const fig = new Figure(opts.width ?? 520, opts.height ?? 520, opts.title ?? "two-particle worldlines");
  const area = fig.plotArea();
  const xs = linearScale(
    [Math.min(...z1, ...z2) - 0.5, Math.max(...z1, ...z2) + 0.5],
    area.x
  );
  const ys = linearScale(
    [Math.min(...ct1, ...ct2), Math.max(...ct1, ...ct2)],
    area.y
  );
  fig.polyline(z1.map(xs), ct1.map(ys), COLORS[0], 2.0);
  fig.polyline(z2.map(xs), ct2.map(ys), COLORS[1], 2.0);
  fig.circle(xs(z1[0]), ys(ct1[0]), 4, COLORS[0]);
  fig.circle(xs(z2[0]), ys(ct2[0]), 4, COLORS[1]);
  fig.axes(xs, ys, "z", "ct");
  fig.legend(
    [
      ["particle 1", COLORS[0]],
      ["particle 2", COLORS[1]],
    ],
    area.x[0] + 10,
    52
  );
  return fig.toString();
}

export function render(kind: FigureKind, inputs: string[], opts: RenderOptions = {}): string {
  switch (kind) {
    case "density_trajectories":
      return densityTrajectories(inputs, opts);
    case "convergence":
      return convergence(inputs, opts);
    case "equivariance":
      return equivariance(inputs, opts);
    case "pair_worldlines":
      return pairWorldlines(inputs, opts);
    default:
      throw new Error(`unknown figure kind '${kind}' (known: ${KINDS.join(", ")})`);
  }
}
