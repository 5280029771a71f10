/**
 * Figure rendering from CLI artifacts.  Every renderer is a pure function of
 * the artifact contents: the physics numbers are read from the files, never
 * recomputed here.
 */

import { readFileSync, writeFileSync } from "node:fs";

import { decaySlope } from "./fit.js";
import {
  Artifact,
  SchemaError,
  numericColumn,
  parseArtifact,
  requireColumns,
  requireFamily,
} from "./schema.js";
import {
  HEIGHT,
  MARGIN,
  SvgBuilder,
  WIDTH,
  divergingColor,
  fmt,
  integerTicks,
  linearScale,
} from "./svg.js";

export type PlotKind = "decay" | "domain-heatmap" | "dk-curve" | "bound-vs-n" | "lens";

export interface PlotSpec {
  /** One artifact path, or several for multi-input kinds (dk-curve). */
  input: string | string[];
  kind: PlotKind;
  /** Where to write the SVG; omit to skip writing. */
  output?: string;
}

export interface RenderResult {
  svg: string;
  /** Numbers the figure is built from, for downstream checks. */
  data: Record<string, number | number[]>;
}

const PLOT_X0 = MARGIN.left;
const PLOT_X1 = WIDTH - MARGIN.right;
const PLOT_Y0 = HEIGHT - MARGIN.bottom;
const PLOT_Y1 = MARGIN.top;

function loadArtifacts(input: string | string[]): Artifact[] {
  const paths = Array.isArray(input) ? input : [input];
  if (paths.length === 0) throw new SchemaError("plot spec lists no input artifact");
  return paths.map((p) => parseArtifact(readFileSync(p, "utf8")));
}

export function render(spec: PlotSpec): RenderResult {
  const artifacts = loadArtifacts(spec.input);
  let result: RenderResult;
  switch (spec.kind) {
    case "decay":
      result = renderDecay(one(artifacts, spec.kind));
      break;
    case "domain-heatmap":
      result = renderDomainHeatmap(one(artifacts, spec.kind));
      break;
    case "dk-curve":
      result = renderDkCurve(artifacts);
      break;
    case "bound-vs-n":
      result = renderBoundVsN(one(artifacts, spec.kind));
      break;
    case "lens":
      result = renderLens(one(artifacts, spec.kind));
      break;
    default:
      throw new SchemaError(`unknown plot kind "${String(spec.kind)}"`);
  }
  if (spec.output) writeFileSync(spec.output, result.svg);
  return result;
}

function one(artifacts: Artifact[], kind: PlotKind): Artifact {
  if (artifacts.length !== 1) {
    throw new SchemaError(`plot kind ${kind} takes exactly one input artifact`);
  }
  return artifacts[0]!;
}

/** Norm decay against support size, log y-axis, with the fitted slope drawn. */
export function renderDecay(artifact: Artifact): RenderResult {
  requireFamily(artifact, "xxzql.quasiloc");
  requireColumns(artifact, ["kind", "r", "value"]);
  const table = artifact.rows.filter((row) => row.kind === "q_norm_sq");
  if (table.length < 3) throw new SchemaError("decay table has fewer than 3 rows");
  const rs = table.map((row) => Number(row.r));
  const values = table.map((row) => Number(row.value));
  const xiRow = artifact.rows.find((row) => row.kind === "xi");
  const fit = decaySlope(rs, values);

  const logs = values.map((v) => Math.log10(v));
  const x = linearScale([rs[0]!, rs[rs.length - 1]!], [PLOT_X0, PLOT_X1]);
  const y = linearScale([Math.floor(Math.min(...logs)), Math.ceil(Math.max(...logs))],
                        [PLOT_Y0, PLOT_Y1]);

  const builder = new SvgBuilder(
    `density norm decay (l=${artifact.config.l}, m=${artifact.config.m})`,
  );
  builder.axes(x, y, "support size r", "|q_r|^2",
               (v) => String(v), (v) => `1e${v}`,
               integerTicks(x.domain), integerTicks(y.domain));
  // fitted geometric envelope, drawn across the fitted range in log10 coords
  const ln10 = Math.LN10;
  const xFitLo = 4;
  const xFitHi = rs[rs.length - 1]!;
  builder.line(
    x(xFitLo), y((fit.slope * xFitLo + fit.intercept) / ln10),
    x(xFitHi), y((fit.slope * xFitHi + fit.intercept) / ln10),
    "#c44", 1.5, "6 3",
  );
  builder.polyline(rs.map((r, i) => [x(r), y(logs[i]!)] as [number, number]), "#26c");
  for (let i = 0; i < rs.length; i++) builder.circle(x(rs[i]!), y(logs[i]!), 3, "#26c");
  builder.text(PLOT_X1 - 6, PLOT_Y1 + 14, `fit slope ${fit.slope.toFixed(4)}`, "end");

  const data: RenderResult["data"] = { slope: fit.slope, r: rs, value: values };
  if (xiRow) data.xi = Number(xiRow.value);
  return { svg: builder.render(), data };
}

/** Contraction factor over the spectral-parameter strip; tau1 = 1 is the boundary. */
export function renderDomainHeatmap(artifact: Artifact): RenderResult {
  requireFamily(artifact, "xxzql.quasiloc");
  requireColumns(artifact, ["kind", "phi_re", "phi_im", "value"]);
  const cells = artifact.rows.filter((row) => row.kind === "tau1_grid");
  if (cells.length === 0) throw new SchemaError("artifact carries no tau1_grid rows");
  const res = [...new Set(cells.map((c) => Number(c.phi_re)))].sort((a, b) => a - b);
  const ims = [...new Set(cells.map((c) => Number(c.phi_im)))].sort((a, b) => a - b);
  const x = linearScale([res[0]!, res[res.length - 1]!], [PLOT_X0, PLOT_X1]);
  const y = linearScale([ims[0]!, ims[ims.length - 1]!], [PLOT_Y0, PLOT_Y1]);
  const cellW = (PLOT_X1 - PLOT_X0) / (res.length - 1);
  const cellH = (PLOT_Y0 - PLOT_Y1) / (ims.length - 1);

  const m = Number(artifact.config.m);
  const builder = new SvgBuilder(`contraction factor tau1 over the strip (m=${m})`);
  for (const cell of cells) {
    const vx = x(Number(cell.phi_re)) - cellW / 2;
    const vy = y(Number(cell.phi_im)) - cellH / 2;
    builder.rect(vx, vy, cellW, cellH, divergingColor(Number(cell.value), 1.0, 0.8));
  }
  builder.axes(x, y, "Re phi", "Im phi");
  // the certified domain ends where tau1 reaches 1
  for (const side of [-1, 1]) {
    const edge = Math.PI / 2 + (side * Math.PI) / (2 * m);
    builder.line(x(edge), PLOT_Y0, x(edge), PLOT_Y1, "#000", 1.5, "4 3");
  }
  const values = cells.map((c) => Number(c.value));
  return {
    svg: builder.render(),
    data: { tau1Min: Math.min(...values), tau1Max: Math.max(...values) },
  };
}

/** Ballistic constant against the anisotropy denominator, one artifact per m. */
export function renderDkCurve(artifacts: Artifact[]): RenderResult {
  const points: { m: number; dk: number }[] = [];
  for (const artifact of artifacts) {
    requireFamily(artifact, "xxzql.drude");
    requireColumns(artifact, ["m", "D_K"]);
    for (const row of artifact.rows) {
      points.push({ m: Number(row.m), dk: Number(row.D_K) });
    }
  }
  points.sort((a, b) => a.m - b.m);
  const x = linearScale([points[0]!.m, points[points.length - 1]!.m], [PLOT_X0, PLOT_X1]);
  const y = linearScale([0, 1], [PLOT_Y0, PLOT_Y1]);
  const builder = new SvgBuilder("ballistic weight bound D_K at l=1");
  builder.axes(x, y, "m", "D_K", (v) => String(v), undefined, integerTicks(x.domain));
  builder.polyline(points.map((p) => [x(p.m), y(p.dk)] as [number, number]), "#26c");
  for (const p of points) builder.circle(x(p.m), y(p.dk), 3.5, "#26c");
  return {
    svg: builder.render(),
    data: { m: points.map((p) => p.m), D_K: points.map((p) => p.dk) },
  };
}

/** Exact finite-n susceptibility next to its variational lower bound. */
export function renderBoundVsN(artifact: Artifact): RenderResult {
  requireFamily(artifact, "xxzql.susceptibility");
  requireColumns(artifact, ["n", "D_n", "mazur_bound"]);
  const ns = numericColumn(artifact, "n");
  const dn = numericColumn(artifact, "D_n");
  const bound = numericColumn(artifact, "mazur_bound");
  const x = linearScale([ns[0]!, ns[ns.length - 1]!], [PLOT_X0, PLOT_X1]);
  const top = Math.max(...dn) * 1.15;
  const y = linearScale([0, top], [PLOT_Y0, PLOT_Y1]);
  const builder = new SvgBuilder(
    `time-averaged current susceptibility vs chain length (m=${artifact.config.m})`,
  );
  builder.axes(x, y, "n", "weight", (v) => String(v), undefined, integerTicks(x.domain));
  builder.polyline(ns.map((n, i) => [x(n), y(dn[i]!)] as [number, number]), "#26c");
  builder.polyline(ns.map((n, i) => [x(n), y(bound[i]!)] as [number, number]), "#c44", 1.5, "6 3");
  for (let i = 0; i < ns.length; i++) {
    builder.circle(x(ns[i]!), y(dn[i]!), 3.5, "#26c");
    builder.circle(x(ns[i]!), y(bound[i]!), 3.5, "#c44");
  }
  builder.text(PLOT_X1 - 6, PLOT_Y1 + 14, "D_n", "end", 11, "#26c");
  builder.text(PLOT_X1 - 6, PLOT_Y1 + 28, "finite-n bound", "end", 11, "#c44");
  return { svg: builder.render(), data: { n: ns, D_n: dn, bound } };
}

/** Two-disk lens in the cot(phi) plane; the arcs meet at +-i. */
export function renderLens(artifact: Artifact): RenderResult {
  requireFamily(artifact, "xxzql.drude");
  requireColumns(artifact, ["m", "lens_center", "lens_radius"]);
  const row = artifact.rows[0];
  if (!row) throw new SchemaError("lens artifact has no rows");
  const c = Number(row.lens_center);
  const r = Number(row.lens_radius);
  const extent = c + r;
  const span = Math.max(extent, 1) * 1.15;
  // square viewport so circles stay circular
  const side = Math.min(PLOT_X1 - PLOT_X0, PLOT_Y0 - PLOT_Y1);
  const cx = (PLOT_X0 + PLOT_X1) / 2;
  const cy = (PLOT_Y0 + PLOT_Y1) / 2;
  const x = linearScale([-span, span], [cx - side / 2, cx + side / 2]);
  const y = linearScale([-span, span], [cy + side / 2, cy - side / 2]);
  const scale = side / (2 * span);

  const builder = new SvgBuilder(`lens domain in the cot plane (m=${row.m})`);
  builder.axes(x, y, "Re z", "Im z");
  const rr = fmt(r * scale);
  // lens boundary: the near arc of each generating circle, meeting at +-i
  builder.path(
    `M ${fmt(x(0))} ${fmt(y(1))} A ${rr} ${rr} 0 0 1 ${fmt(x(0))} ${fmt(y(-1))} ` +
      `A ${rr} ${rr} 0 0 1 ${fmt(x(0))} ${fmt(y(1))} Z`,
    "#26c", "rgba(40,90,200,0.12)",
  );
  // generating circles, dashed
  for (const center of [-c, c]) {
    builder.raw(
      `<circle cx="${fmt(x(center))}" cy="${fmt(y(0))}" r="${rr}" fill="none" ` +
        `stroke="#888" stroke-width="1" stroke-dasharray="4 3"/>`,
    );
  }
  for (const corner of [1, -1]) {
    builder.circle(x(0), y(corner), 3.5, "#c44");
  }
  builder.text(x(0) + 10, y(1) - 6, "+i", "start", 11, "#c44");
  builder.text(x(0) + 10, y(-1) + 14, "-i", "start", 11, "#c44");
  return {
    svg: builder.render(),
    data: { center: c, radius: r, cornerTop: 1, cornerBottom: -1 },
  };
}
