/**
 * SVG renderers for the five figure kinds.
 *
 * Everything is hand-built SVG: line plots for populations and spectra
 * families, a two-panel diagnostic for the chain map, a rect-grid
 * heatmap for the field correlation (with the dielectric slab marked by
 * dashed lines when the CSV metadata carries its geometry), and a
 * two-series comparison for the coupling profiles.
 */

import { ParsedCsv, column, requireColumns } from "./csv.js";

export type FigureKind =
  | "spectra"
  | "chain_diag"
  | "population"
  | "fieldmap"
  | "couplings";

export interface StyleOptions {
  width?: number;
  height?: number;
  logColor?: boolean; // fieldmap: log color scale instead of linear
  logY?: boolean; // couplings / chain defect panels
}

export interface PlotJob {
  kind: FigureKind;
  inputs: ParsedCsv[];
  style?: StyleOptions;
}

export const EXPECTED_COLUMNS: Record<FigureKind, string[]> = {
  spectra: ["g_over_w1", "variant", "level_index", "gap"],
  chain_diag: ["n", "xi_over_wa", "t_over_wa", "orthogonality_defect"],
  population: ["time_over_T", "pop"],
  fieldmap: ["time_over_T", "x_over_L", "g1"],
  couplings: ["k", "omega_k_over_wa", "g_over_w_adjacent", "g_over_w_embedded"],
};

const PALETTE = [
  "#4361ee",
  "#d62828",
  "#2d6a4f",
  "#f77f00",
  "#7b2cbf",
  "#118ab2",
  "#6a4c93",
  "#bc4749",
];

const MARGIN = { left: 64, right: 24, top: 40, bottom: 46 };

// ---------------------------------------------------------------------------
// scales and primitives
// ---------------------------------------------------------------------------

interface Scale {
  (v: number): number;
  min: number;
  max: number;
}

function linearScale(min: number, max: number, r0: number, r1: number): Scale {
  const span = max - min || 1;
  const fn = ((v: number) => r0 + ((v - min) / span) * (r1 - r0)) as Scale;
  fn.min = min;
  fn.max = max;
  return fn;
}

function extent(values: number[], fallback: [number, number] = [0, 1]): [number, number] {
  if (values.length === 0) return fallback;
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (Number.isFinite(v)) {
      lo = Math.min(lo, v);
      hi = Math.max(hi, v);
    }
  }
  if (!Number.isFinite(lo)) return fallback;
  if (lo === hi) return [lo - 0.5, hi + 0.5];
  return [lo, hi];
}

function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(1);
  return Number(v.toPrecision(4)).toString();
}

function ticks(min: number, max: number, n = 5): number[] {
  const span = max - min || 1;
  const step = Math.pow(10, Math.floor(Math.log10(span / n)));
  const err = span / n / step;
  const mult = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const s = mult * step;
  const out: number[] = [];
  for (let v = Math.ceil(min / s) * s; v <= max + 1e-12 * span; v += s) out.push(v);
  return out;
}

function polyline(xs: number[], ys: number[], sx: Scale, sy: Scale, color: string, width = 1.5, dash = ""): string {
  const pts = xs.map((x, i) => `${sx(x).toFixed(2)},${sy(ys[i]).toFixed(2)}`).join(" ");
  const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
  return `<polyline fill="none" stroke="${color}" stroke-width="${width}"${dashAttr} points="${pts}"/>`;
}

function axes(sx: Scale, sy: Scale, xLabel: string, yLabel: string, title: string, w: number, h: number, yTickFmt: (v: number) => string = fmt): string {
  const parts: string[] = [];
  const x0 = MARGIN.left;
  const x1 = w - MARGIN.right;
  const y0 = h - MARGIN.bottom;
  const y1 = MARGIN.top;
  parts.push(`<rect x="${x0}" y="${y1}" width="${x1 - x0}" height="${y0 - y1}" fill="none" stroke="#333"/>`);
  for (const t of ticks(sx.min, sx.max)) {
    const px = sx(t);
    parts.push(`<line x1="${px}" y1="${y0}" x2="${px}" y2="${y0 + 4}" stroke="#333"/>`);
    parts.push(`<text x="${px}" y="${y0 + 18}" font-size="11" text-anchor="middle">${fmt(t)}</text>`);
  }
  for (const t of ticks(sy.min, sy.max)) {
    const py = sy(t);
    parts.push(`<line x1="${x0 - 4}" y1="${py}" x2="${x0}" y2="${py}" stroke="#333"/>`);
    parts.push(`<text x="${x0 - 7}" y="${py + 4}" font-size="11" text-anchor="end">${yTickFmt(t)}</text>`);
  }
  parts.push(`<text x="${(x0 + x1) / 2}" y="${h - 10}" font-size="13" text-anchor="middle">${xLabel}</text>`);
  parts.push(`<text x="16" y="${(y0 + y1) / 2}" font-size="13" text-anchor="middle" transform="rotate(-90 16 ${(y0 + y1) / 2})">${yLabel}</text>`);
  parts.push(`<text x="${(x0 + x1) / 2}" y="22" font-size="14" font-weight="bold" text-anchor="middle">${title}</text>`);
  return parts.join("\n");
}

function legend(entries: Array<[string, string]>, x: number, y: number): string {
  return entries
    .map(([label, color], i) => {
      const ly = y + 16 * i;
      return (
        `<line x1="${x}" y1="${ly}" x2="${x + 18}" y2="${ly}" stroke="${color}" stroke-width="2"/>` +
        `<text x="${x + 24}" y="${ly + 4}" font-size="11">${label}</text>`
      );
    })
    .join("\n");
}

function svgDoc(body: string, w: number, h: number): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${w}" height="${h}" ` +
    `font-family="Helvetica, Arial, sans-serif">\n<rect width="100%" height="100%" fill="white"/>\n` +
    body +
    "\n</svg>\n"
  );
}

// ---------------------------------------------------------------------------
// figure kinds
// ---------------------------------------------------------------------------

function renderPopulation(csv: ParsedCsv, style: StyleOptions): string {
  const w = style.width ?? 640;
  const h = style.height ?? 400;
  const t = column(csv, "time_over_T");
  const p = column(csv, "pop");
  const [tx0, tx1] = extent(t);
  const sx = linearScale(tx0, tx1, MARGIN.left, w - MARGIN.right);
  const sy = linearScale(0, Math.max(1, ...p), h - MARGIN.bottom, MARGIN.top);
  let body = axes(sx, sy, "t / T", "excited-state population", "Atom population", w, h);
  if (t.length > 0) body += "\n" + polyline(t, p, sx, sy, PALETTE[0]);
  return svgDoc(body, w, h);
}

function renderSpectra(csv: ParsedCsv, style: StyleOptions): string {
  const w = style.width ?? 720;
  const h = style.height ?? 480;
  const idx = {
    g: csv.columns.indexOf("g_over_w1"),
    variant: csv.columns.indexOf("variant"),
    level: csv.columns.indexOf("level_index"),
    gap: csv.columns.indexOf("gap"),
  };
  // the variant column is textual: recover it from the raw rows
  const variants = new Map<string, Map<number, Array<[number, number]>>>();
  for (let i = 0; i < csv.rows.length; i++) {
    const name = csv.rawRows[i][idx.variant];
    const g = csv.rows[i][idx.g];
    const level = csv.rows[i][idx.level];
    const gap = csv.rows[i][idx.gap];
    if (!variants.has(name)) variants.set(name, new Map());
    const byLevel = variants.get(name)!;
    if (!byLevel.has(level)) byLevel.set(level, []);
    byLevel.get(level)!.push([g, gap]);
  }
  const allG: number[] = [];
  const allGap: number[] = [];
  for (const byLevel of variants.values())
    for (const pts of byLevel.values())
      for (const [g, gap] of pts) {
        allG.push(g);
        allGap.push(gap);
      }
  const [gx0, gx1] = extent(allG);
  const [y0, y1] = extent(allGap);
  const sx = linearScale(gx0, gx1, MARGIN.left, w - MARGIN.right);
  const sy = linearScale(y0, y1, h - MARGIN.bottom, MARGIN.top);
  let body = axes(sx, sy, "g_D,1 / w_1", "(E_i - E_0) / w_1", "Energy spectra", w, h);
  const names = Array.from(variants.keys()).sort();
  names.forEach((name, vi) => {
    const color = PALETTE[vi % PALETTE.length];
    for (const pts of variants.get(name)!.values()) {
      pts.sort((a, b) => a[0] - b[0]);
      body += "\n" + polyline(pts.map((p) => p[0]), pts.map((p) => p[1]), sx, sy, color, 1.2);
    }
  });
  body += "\n" + legend(names.map((n, i) => [n, PALETTE[i % PALETTE.length]]), MARGIN.left + 10, MARGIN.top + 14);
  return svgDoc(body, w, h);
}

function renderChainDiag(inputs: ParsedCsv[], style: StyleOptions): string {
  const w = style.width ?? 720;
  const h = style.height ?? 560;
  const half = (h - MARGIN.top - MARGIN.bottom) / 2;
  const allN: number[] = [];
  const allXi: number[] = [];
  let maxDefect = 0;
  for (const csv of inputs) {
    allN.push(...column(csv, "n"));
    allXi.push(...column(csv, "xi_over_wa"));
    maxDefect = Math.max(maxDefect, ...column(csv, "orthogonality_defect"));
  }
  const [n0, n1] = extent(allN);
  const [xi0, xi1] = extent(allXi);
  const sx = linearScale(n0, n1, MARGIN.left, w - MARGIN.right);
  const syXi = linearScale(xi0, xi1, MARGIN.top + half - 8, MARGIN.top);
  const logDef = (v: number) => Math.log10(Math.max(v, 1e-17));
  const syDef = linearScale(-17, Math.max(logDef(maxDefect), -15) + 1, h - MARGIN.bottom, MARGIN.top + half + 16);

  let body = `<text x="${w / 2}" y="22" font-size="14" font-weight="bold" text-anchor="middle">Chain-map diagnostics</text>`;
  body += `\n<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${w - MARGIN.left - MARGIN.right}" height="${half - 8}" fill="none" stroke="#333"/>`;
  body += `\n<rect x="${MARGIN.left}" y="${MARGIN.top + half + 16}" width="${w - MARGIN.left - MARGIN.right}" height="${h - MARGIN.bottom - MARGIN.top - half - 16}" fill="none" stroke="#333"/>`;
  const entries: Array<[string, string]> = [];
  inputs.forEach((csv, i) => {
    const color = PALETTE[i % PALETTE.length];
    const n = column(csv, "n");
    body += "\n" + polyline(n, column(csv, "xi_over_wa"), sx, syXi, color, 1.4);
    body += "\n" + polyline(n, column(csv, "orthogonality_defect").map(logDef), sx, syDef, color, 1.4);
    const base = csv.path.split("/").pop() ?? csv.path;
    entries.push([base.replace(/\.csv$/, ""), color]);
  });
  for (const t of ticks(sx.min, sx.max)) {
    body += `\n<text x="${sx(t)}" y="${h - MARGIN.bottom + 18}" font-size="11" text-anchor="middle">${fmt(t)}</text>`;
  }
  for (const t of ticks(syXi.min, syXi.max, 4)) {
    body += `\n<text x="${MARGIN.left - 7}" y="${syXi(t) + 4}" font-size="11" text-anchor="end">${fmt(t)}</text>`;
  }
  for (const t of ticks(syDef.min, syDef.max, 4)) {
    body += `\n<text x="${MARGIN.left - 7}" y="${syDef(t) + 4}" font-size="11" text-anchor="end">1e${Math.round(t)}</text>`;
  }
  body += `\n<text x="16" y="${MARGIN.top + half / 2}" font-size="13" text-anchor="middle" transform="rotate(-90 16 ${MARGIN.top + half / 2})">xi_n / w_a</text>`;
  body += `\n<text x="16" y="${MARGIN.top + half + 16 + half / 2}" font-size="13" text-anchor="middle" transform="rotate(-90 16 ${MARGIN.top + half + 16 + half / 2})">orthogonality defect</text>`;
  body += `\n<text x="${w / 2}" y="${h - 10}" font-size="13" text-anchor="middle">chain site n</text>`;
  body += "\n" + legend(entries, MARGIN.left + 10, MARGIN.top + 14);
  return svgDoc(body, w, h);
}

function colorRamp(t: number): string {
  // white -> blue -> red, clamped
  const u = Math.max(0, Math.min(1, t));
  const stops = [
    [255, 255, 255],
    [67, 97, 238],
    [214, 40, 40],
  ];
  const seg = u < 0.5 ? 0 : 1;
  const f = (u - 0.5 * seg) * 2;
  const a = stops[seg];
  const b = stops[seg + 1];
  const c = a.map((av, i) => Math.round(av + (b[i] - av) * f));
  return `rgb(${c[0]},${c[1]},${c[2]})`;
}

function renderFieldmap(csv: ParsedCsv, style: StyleOptions): string {
  const w = style.width ?? 720;
  const h = style.height ?? 520;
  const t = column(csv, "time_over_T");
  const x = column(csv, "x_over_L");
  const g = column(csv, "g1");
  const timesArr = Array.from(new Set(t)).sort((a, b) => a - b);
  const xsArr = Array.from(new Set(x)).sort((a, b) => a - b);
  const peak = g.reduce((m, v) => Math.max(m, v), 0) || 1;
  const floor = peak * 1e-6;
  const sx = linearScale(xsArr[0] ?? 0, xsArr[xsArr.length - 1] ?? 1, MARGIN.left, w - MARGIN.right);
  const sy = linearScale(timesArr[0] ?? 0, timesArr[timesArr.length - 1] ?? 1, MARGIN.top, h - MARGIN.bottom);
  const cellW = xsArr.length > 1 ? (sx(xsArr[1]) - sx(xsArr[0])) : (w - MARGIN.left - MARGIN.right);
  const cellH = timesArr.length > 1 ? (sy(timesArr[1]) - sy(timesArr[0])) : (h - MARGIN.top - MARGIN.bottom);
  const cells: string[] = [];
  for (let i = 0; i < g.length; i++) {
    const shade = style.logColor
      ? (Math.log10(Math.max(g[i], floor)) - Math.log10(floor)) / (Math.log10(peak) - Math.log10(floor))
      : g[i] / peak;
    cells.push(
      `<rect x="${sx(x[i]).toFixed(2)}" y="${sy(t[i]).toFixed(2)}" width="${Math.abs(cellW).toFixed(2)}" height="${Math.abs(cellH).toFixed(2)}" fill="${colorRamp(shade)}"/>`
    );
  }
  let body = cells.join("\n");
  // dielectric slab boundaries from the run metadata, when present
  const center = Number(csv.meta["slab_center_over_L"]);
  const thick = Number(csv.meta["slab_thickness_over_L"]);
  if (Number.isFinite(center) && Number.isFinite(thick)) {
    for (const edge of [center - thick / 2, center + thick / 2]) {
      body += `\n<line x1="${sx(edge)}" y1="${MARGIN.top}" x2="${sx(edge)}" y2="${h - MARGIN.bottom}" stroke="white" stroke-width="1.5" stroke-dasharray="6,4"/>`;
    }
  }
  const sxAx = linearScale(sx.min, sx.max, MARGIN.left, w - MARGIN.right);
  const syAx = linearScale(sy.min, sy.max, h - MARGIN.bottom, MARGIN.top);
  // draw frame and labels on top of the cells (time increases downward)
  body += "\n" + axes(sxAx, syAx, "x / L", "t / T (increasing downward)", "Field correlation G1(x, t)", w, h, (v) => fmt(sy.max + sy.min - v));
  return svgDoc(body, w, h);
}

function renderCouplings(csv: ParsedCsv, style: StyleOptions): string {
  const w = style.width ?? 640;
  const h = style.height ?? 420;
  const k = column(csv, "k");
  const adj = column(csv, "g_over_w_adjacent");
  const emb = column(csv, "g_over_w_embedded");
  const [k0, k1] = extent(k);
  const sx = linearScale(k0, k1, MARGIN.left, w - MARGIN.right);
  let yAdj = adj;
  let yEmb = emb;
  let yLabel = "|g_D,k / w_k|";
  if (style.logY) {
    const floor = 1e-8;
    yAdj = adj.map((v) => Math.log10(Math.max(v, floor)));
    yEmb = emb.map((v) => Math.log10(Math.max(v, floor)));
    yLabel = "log10 |g_D,k / w_k|";
  }
  const [y0, y1] = extent([...yAdj, ...yEmb]);
  const sy = linearScale(Math.min(0, y0), y1, h - MARGIN.bottom, MARGIN.top);
  let body = axes(sx, sy, "mode index k", yLabel, "Coupling profiles", w, h);
  body += "\n" + polyline(k, yAdj, sx, sy, PALETTE[0]);
  body += "\n" + polyline(k, yEmb, sx, sy, PALETTE[1]);
  for (let i = 0; i < k.length; i++) {
    body += `\n<circle cx="${sx(k[i])}" cy="${sy(yAdj[i])}" r="3" fill="${PALETTE[0]}"/>`;
    body += `\n<circle cx="${sx(k[i])}" cy="${sy(yEmb[i])}" r="3" fill="${PALETTE[1]}"/>`;
  }
  body += "\n" + legend(
    [
      ["atom next to slab", PALETTE[0]],
      ["atom inside slab", PALETTE[1]],
    ],
    w - 220,
    MARGIN.top + 14
  );
  return svgDoc(body, w, h);
}

// ---------------------------------------------------------------------------
// entry point
// ---------------------------------------------------------------------------

export function render(job: PlotJob): string {
  const style = job.style ?? {};
  const expected = EXPECTED_COLUMNS[job.kind];
  for (const csv of job.inputs) requireColumns(csv, expected);
  switch (job.kind) {
    case "population":
      return renderPopulation(job.inputs[0], style);
    case "spectra":
      return renderSpectra(job.inputs[0], style);
    case "chain_diag":
      return renderChainDiag(job.inputs, style);
    case "fieldmap":
      return renderFieldmap(job.inputs[0], style);
    case "couplings":
      return renderCouplings(job.inputs[0], style);
  }
}
