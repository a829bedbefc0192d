/**
 * Turns a figure recipe plus a run directory into one SVG document.
 *
 * Rendering is pure plotting: values are scaled onto fixed-size panels and
 * nothing is computed from them, so the output bytes depend only on the
 * recipe and the CSV contents. Samples that are masked (NaN) or outside a
 * log axis domain become gaps in the curve.
 */

import { readFileSync } from "node:fs";
import { join } from "node:path";
import { MissingFileError, RecipeError } from "./errors.js";
import { FigureRecipe, PanelSpec, recipeById, recipesFor } from "./recipes.js";
import { Scale, extent, formatNumber, linearScale, logScale } from "./scales.js";
import { curvePath, el, esc, px, svgDocument, text } from "./svg.js";
import { Table, readTable } from "./table.js";

const PLOT_W = 300;
const PLOT_H = 190;
const MARGIN = { left: 64, right: 16, top: 28, bottom: 44 };
const CELL_W = MARGIN.left + PLOT_W + MARGIN.right;
const CELL_H = MARGIN.top + PLOT_H + MARGIN.bottom;
const OUTER = 4;

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

function seriesColor(i: number): string {
  return PALETTE[i % PALETTE.length] ?? "#000000";
}

function scaled(values: number[], factor: number | undefined): number[] {
  return factor === undefined ? values : values.map((v) => v * factor);
}

/** Smallest spacing between distinct sorted sample positions. */
function minSpacing(xs: number[]): number {
  const sorted = [...xs].filter(Number.isFinite).sort((a, b) => a - b);
  let best = Infinity;
  for (let i = 1; i < sorted.length; i++) {
    const d = (sorted[i] ?? 0) - (sorted[i - 1] ?? 0);
    if (d > 0 && d < best) best = d;
  }
  return Number.isFinite(best) ? best : 1;
}

function yDomain(panel: PanelSpec, table: Table): [number, number] {
  const log = panel.y.log === true;
  const values: number[] = [];
  for (const s of panel.series) {
    const ys = scaled(table.column(s.column), panel.y.factor);
    values.push(...ys);
    if (s.spread) {
      const se = scaled(table.column(s.spread), panel.y.factor);
      ys.forEach((v, i) => {
        const e = se[i] ?? NaN;
        values.push(v - e, v + e);
      });
    }
  }
  const ext = extent(values, log);
  if (ext === null) return log ? [1e-2, 1] : [0, 1];
  let [lo, hi] = ext;
  if (log) {
    lo /= 1.25;
    hi *= 1.25;
  } else {
    if (panel.kind === "bars" && lo > 0) lo = 0;
    const pad = (hi - lo) * 0.04;
    lo -= pad;
    hi += pad;
  }
  return [lo, hi];
}

function axes(panel: PanelSpec, xScale: Scale, yScale: Scale): string[] {
  const out: string[] = [];
  out.push(
    el("rect", {
      x: 0,
      y: 0,
      width: PLOT_W,
      height: PLOT_H,
      fill: "none",
      stroke: "#333333",
      "stroke-width": "1",
    }),
  );
  for (const t of xScale.ticks()) {
    const xp = xScale.map(t);
    out.push(
      el("line", { x1: xp, y1: PLOT_H, x2: xp, y2: PLOT_H + 4, stroke: "#333333" }),
      text(xp, PLOT_H + 16, formatNumber(t), { "text-anchor": "middle", "font-size": "10" }),
    );
  }
  for (const t of yScale.ticks()) {
    const yp = yScale.map(t);
    out.push(
      el("line", { x1: -4, y1: yp, x2: 0, y2: yp, stroke: "#333333" }),
      text(-7, yp + 3, formatNumber(t), { "text-anchor": "end", "font-size": "10" }),
    );
  }
  out.push(
    text(PLOT_W / 2, PLOT_H + 32, panel.x.label, { "text-anchor": "middle", "font-size": "11" }),
    el(
      "text",
      {
        x: 0,
        y: 0,
        "text-anchor": "middle",
        "font-size": "11",
        transform: `rotate(-90) translate(${px(-PLOT_H / 2)},${px(-MARGIN.left + 14)})`,
      },
      esc(panel.y.label),
    ),
  );
  return out;
}

function bandPath(
  xs: number[],
  lo: number[],
  hi: number[],
  xScale: Scale,
  yScale: Scale,
): string {
  // one closed subpath per contiguous run of drawable samples
  const parts: string[] = [];
  let run: number[] = [];
  const flush = () => {
    if (run.length < 2) {
      run = [];
      return;
    }
    const upper = run.map((i) => `${px(xScale.map(xs[i] ?? 0))} ${px(yScale.map(hi[i] ?? 0))}`);
    const lower = [...run]
      .reverse()
      .map((i) => `${px(xScale.map(xs[i] ?? 0))} ${px(yScale.map(lo[i] ?? 0))}`);
    parts.push(`M${upper.join("L")}L${lower.join("L")}Z`);
    run = [];
  };
  for (let i = 0; i < xs.length; i++) {
    const ok =
      xScale.drawable(xs[i] ?? NaN) &&
      yScale.drawable(lo[i] ?? NaN) &&
      yScale.drawable(hi[i] ?? NaN);
    if (ok) run.push(i);
    else flush();
  }
  flush();
  return parts.join("");
}

function renderSeries(panel: PanelSpec, table: Table, xScale: Scale, yScale: Scale): string[] {
  const out: string[] = [];
  const xs = scaled(table.column(panel.x.column), panel.x.factor);

  if (panel.kind === "bars") {
    const first = panel.series[0];
    if (first === undefined) return out;
    const ys = scaled(table.column(first.column), panel.y.factor);
    const half = Math.abs(xScale.map(minSpacing(xs) * 0.35) - xScale.map(0));
    const base = yScale.map(Math.max(0, yScale.ticks()[0] ?? 0));
    for (let i = 0; i < xs.length; i++) {
      const x = xs[i] ?? NaN;
      const y = ys[i] ?? NaN;
      if (!xScale.drawable(x) || !yScale.drawable(y)) continue;
      const top = yScale.map(y);
      out.push(
        el("rect", {
          x: xScale.map(x) - half,
          y: Math.min(top, base),
          width: 2 * half,
          height: Math.abs(base - top),
          fill: seriesColor(0),
          stroke: "#333333",
          "stroke-width": "0.5",
        }),
      );
    }
    return out;
  }

  panel.series.forEach((s, si) => {
    const ys = scaled(table.column(s.column), panel.y.factor);
    if (s.spread) {
      const se = scaled(table.column(s.spread), panel.y.factor);
      const lo = ys.map((v, i) => v - (se[i] ?? NaN));
      const hi = ys.map((v, i) => v + (se[i] ?? NaN));
      const d = bandPath(xs, lo, hi, xScale, yScale);
      if (d !== "") {
        out.push(el("path", { d, fill: seriesColor(si), "fill-opacity": "0.25", stroke: "none" }));
      }
    }
    const xPix = xs.map((v) => px(xScale.map(v)));
    const yPix = ys.map((v, i) =>
      xScale.drawable(xs[i] ?? NaN) && yScale.drawable(v) ? px(yScale.map(v)) : null,
    );
    const d = curvePath(xPix, yPix);
    if (d === "") return;
    out.push(
      el("path", {
        d,
        fill: "none",
        stroke: seriesColor(si),
        "stroke-width": "1.5",
        "stroke-linejoin": "round",
        "data-series": s.column,
      }),
    );
  });
  return out;
}

function legend(panel: PanelSpec): string[] {
  if (panel.kind === "bars" || panel.series.length < 2) return [];
  const out: string[] = [];
  panel.series.forEach((s, si) => {
    const y = 12 + 14 * si;
    out.push(
      el("line", {
        x1: PLOT_W - 86,
        y1: y - 3,
        x2: PLOT_W - 70,
        y2: y - 3,
        stroke: seriesColor(si),
        "stroke-width": "1.5",
      }),
      text(PLOT_W - 66, y, s.label, { "font-size": "10" }),
    );
  });
  return out;
}

function renderPanel(panel: PanelSpec, table: Table, ox: number, oy: number): string {
  const xs = scaled(table.column(panel.x.column), panel.x.factor);
  const xExt = extent(xs) ?? [0, 1];
  const xScale = panel.kind === "bars"
    ? linearScale(xExt[0] - minSpacing(xs) / 2, xExt[1] + minSpacing(xs) / 2, 0, PLOT_W)
    : linearScale(xExt[0], xExt[1], 0, PLOT_W);
  const [ylo, yhi] = yDomain(panel, table);
  const yScale = panel.y.log === true
    ? logScale(ylo, yhi, PLOT_H, 0)
    : linearScale(ylo, yhi, PLOT_H, 0);

  const body = [
    text(0, -10, panel.title, { "font-size": "12", "font-weight": "bold" }),
    ...axes(panel, xScale, yScale),
    ...renderSeries(panel, table, xScale, yScale),
    ...legend(panel),
  ];
  const tx = px(ox + MARGIN.left);
  const ty = px(oy + MARGIN.top);
  return el("g", { transform: `translate(${tx},${ty})` }, "\n" + body.join("\n") + "\n");
}

export function renderFigure(recipe: FigureRecipe, runDir: string): string {
  const tables = new Map<string, Table>();
  const tableFor = (input: string): Table => {
    let t = tables.get(input);
    if (t === undefined) {
      t = readTable(join(runDir, input));
      tables.set(input, t);
    }
    return t;
  };

  const cols = Math.min(2, recipe.panels.length);
  const rows = Math.ceil(recipe.panels.length / 2);
  const width = 2 * OUTER + cols * CELL_W;
  const height = 2 * OUTER + rows * CELL_H;

  const body = [el("title", {}, recipe.id)];
  recipe.panels.forEach((panel, i) => {
    const ox = OUTER + (i % 2) * CELL_W;
    const oy = OUTER + Math.floor(i / 2) * CELL_H;
    body.push(renderPanel(panel, tableFor(panel.input), ox, oy));
  });
  return svgDocument(width, height, body);
}

export interface RenderedFigure {
  id: string;
  svg: string;
}

interface RunSummary {
  scenario: string;
  kind: string;
}

function readSummary(runDir: string): RunSummary {
  const path = join(runDir, "summary.json");
  let raw: string;
  try {
    raw = readFileSync(path, "utf8");
  } catch (err) {
    if ((err as NodeJS.ErrnoException).code === "ENOENT") {
      throw new MissingFileError(path);
    }
    throw err;
  }
  const summary = JSON.parse(raw) as { scenario?: { name?: string; kind?: string } };
  const name = summary.scenario?.name;
  const kind = summary.scenario?.kind;
  if (typeof name !== "string" || typeof kind !== "string") {
    throw new RecipeError(`summary.json in ${runDir} lacks a scenario name and kind`);
  }
  return { scenario: name, kind };
}

/**
 * Render every bundled recipe matching the run directory, or a single recipe
 * when `figureId` names one explicitly.
 */
export function renderRun(runDir: string, figureId?: string): RenderedFigure[] {
  if (figureId !== undefined) {
    const recipe = recipeById(figureId);
    if (recipe === undefined) {
      throw new RecipeError(`unknown figure id "${figureId}"`);
    }
    return [{ id: recipe.id, svg: renderFigure(recipe, runDir) }];
  }
  const { scenario, kind } = readSummary(runDir);
  const recipes = recipesFor(scenario, kind);
  if (recipes.length === 0) {
    throw new RecipeError(`no bundled recipes for scenario "${scenario}" with kind "${kind}"`);
  }
  return recipes.map((r) => ({ id: r.id, svg: renderFigure(r, runDir) }));
}
