/**
 * The three figure kinds rendered from the simulator CLI's outputs:
 *
 *  - coverage:   coverage probability vs the swept key; analytic curve plus
 *                Monte Carlo markers with a confidence band.
 *  - maxmin:     mean max-min SINR (left axis) and mean minimal travel time
 *                (right axis, dashed) vs the inner sweep key, one color per
 *                outer sweep value.
 *  - trajectory: the solved network map — roads, both station kinds, the
 *                relay chain's coverage disks, and the waypoint polyline.
 */

import { mkdirSync, readFileSync, writeFileSync } from "fs";
import { basename, dirname } from "path";

import {
  SchemaError, Table, TrajectoryDoc,
  checkOverlay, column, parseTable, parseTrajectory, requireColumns,
} from "./schema.js";
import { Series, esc, fmtNum, lineChart } from "./svg.js";

export type FigureKind = "coverage" | "maxmin" | "trajectory";

/** One figure to render: input files, the kind, and the image path. */
export interface FigureSpec {
  kind: FigureKind;
  inputs: string[];
  output: string;
}

const PALETTE = ["#4361ee", "#e63946", "#2d6a4f", "#f3722c", "#7209b7", "#0096c7"];

// -- coverage -----------------------------------------------------------------

const COVERAGE_COLUMNS = ["analytic_p_cov", "mc_p_cov", "mc_ci_lo", "mc_ci_hi"];

export function renderCoverage(tables: Table[], sources: string[]): string {
  checkOverlay(tables, sources);
  const series: Series[] = [];
  let xKey = "";
  tables.forEach((table, i) => {
    const source = sources[i];
    if (table.meta.sweepKeys.length !== 1) {
      throw new SchemaError(`${source}: coverage figures need exactly one sweep_key`);
    }
    xKey = table.meta.sweepKeys[0];
    requireColumns(table, [xKey, ...COVERAGE_COLUMNS], source);
    const x = column(table, xKey);
    const color = PALETTE[i % PALETTE.length];
    const tag = tables.length > 1 ? ` [${basename(source)}]` : "";
    series.push({
      x, y: column(table, "analytic_p_cov"), color,
      label: `analytic${tag}`, width: 1.6,
    });
    series.push({
      x, y: column(table, "mc_p_cov"), color,
      label: `Monte Carlo (95% CI)${tag}`, width: 0.9, dash: "2,3", markers: true,
      band: { lo: column(table, "mc_ci_lo"), hi: column(table, "mc_ci_hi") },
    });
  });
  const meta = tables[0].meta;
  return lineChart({
    title: "Coverage probability",
    subtitle: `config ${meta.configHash} · seed ${meta.seed} · tool ${meta.toolVersion}`,
    xLabel: xKey,
    yLabel: "P(SINR > threshold)",
    series,
  });
}

// -- maxmin -------------------------------------------------------------------

const MAXMIN_COLUMNS = ["mean_gamma_star_db", "mean_t_min_s", "success_rate", "n_realizations"];

export function renderMaxmin(table: Table, source: string): string {
  const keys = table.meta.sweepKeys;
  if (keys.length < 1 || keys.length > 2) {
    throw new SchemaError(`${source}: maxmin figures need one or two sweep_key entries`);
  }
  requireColumns(table, [...keys, ...MAXMIN_COLUMNS], source);
  const xKey = keys[keys.length - 1];
  const x = column(table, xKey);
  const gamma = column(table, "mean_gamma_star_db");
  const tmin = column(table, "mean_t_min_s");

  interface Group { label: string; idx: number[] }
  let groups: Group[];
  if (keys.length === 2) {
    const g = column(table, keys[0]);
    const values = [...new Set(g)];
    groups = values.map((v) => ({
      label: `${keys[0]}=${fmtNum(v)}`,
      idx: g.map((gv, i) => (gv === v ? i : -1)).filter((i) => i >= 0),
    }));
  } else {
    groups = [{ label: "", idx: table.rows.map((_, i) => i) }];
  }

  const series: Series[] = [];
  groups.forEach((grp, gi) => {
    const color = PALETTE[gi % PALETTE.length];
    const pick = (vals: number[]) => grp.idx.map((i) => vals[i]);
    const sep = grp.label ? `, ${grp.label}` : "";
    series.push({
      x: pick(x), y: pick(gamma), color,
      label: `mean gamma* (dB)${sep}`, width: 1.6, markers: true,
    });
    series.push({
      x: pick(x), y: pick(tmin), color, rightAxis: true,
      label: `mean T_min (s)${sep}`, width: 1.1, dash: "5,3",
    });
  });
  const meta = table.meta;
  return lineChart({
    title: "Max-min SINR and minimal travel time",
    subtitle: `config ${meta.configHash} · seed ${meta.seed} · tool ${meta.toolVersion}`,
    xLabel: xKey,
    yLabel: "mean gamma* (dB)",
    rightYLabel: "mean T_min (s)",
    series,
  });
}

// -- trajectory ---------------------------------------------------------------

interface PxTransform {
  x(m: number): number;
  y(m: number): number;
  len(m: number): number;
}

/**
 * Equal-aspect meters->pixels mapping; a disk of radius r maps to a circle
 * of radius len(r), so the containment invariant survives the transform.
 */
function fitViewport(doc: TrajectoryDoc, W: number, H: number, margin: number): PxTransform {
  const xs: number[] = [];
  const ys: number[] = [];
  const push = (x: number, y: number, pad = 0) => {
    xs.push(x - pad, x + pad);
    ys.push(y - pad, y + pad);
  };
  for (const b of doc.bs_sequence) push(b.x_m, b.y_m, b.radius_m);
  for (const [x, y] of doc.waypoints_m) push(x, y);
  push(doc.S_m[0], doc.S_m[1]);
  push(doc.D_m[0], doc.D_m[1]);
  const xMin = Math.min(...xs), xMax = Math.max(...xs);
  const yMin = Math.min(...ys), yMax = Math.max(...ys);
  const cx = (xMin + xMax) / 2, cy = (yMin + yMax) / 2;
  const spanX = xMax - xMin || 1, spanY = yMax - yMin || 1;
  const k = Math.min((W - 2 * margin) / spanX, (H - 2 * margin) / spanY);
  return {
    x: (m: number) => W / 2 + (m - cx) * k,
    y: (m: number) => H / 2 - (m - cy) * k,
    len: (m: number) => m * k,
  };
}

/** Clip the infinite road line (rho, phi) to the pixel frame. */
function clipRoad(rhoM: number, phi: number, t: PxTransform,
                  W: number, H: number): [number, number, number, number] | null {
  const px = rhoM * Math.cos(phi), py = rhoM * Math.sin(phi);
  const ux = -Math.sin(phi), uy = Math.cos(phi);
  // generous parameter range, then Liang-Barsky clip in pixel space
  const span = 1e6;
  let x0 = t.x(px - span * ux), y0 = t.y(py - span * uy);
  let x1 = t.x(px + span * ux), y1 = t.y(py + span * uy);
  let t0 = 0, t1 = 1;
  const dx = x1 - x0, dy = y1 - y0;
  const clips: [number, number][] = [
    [-dx, x0], [dx, W - x0], [-dy, y0], [dy, H - y0],
  ];
  for (const [p, q] of clips) {
    if (p === 0) {
      if (q < 0) return null;
    } else {
      const r = q / p;
      if (p < 0) {
        if (r > t1) return null;
        if (r > t0) t0 = r;
      } else {
        if (r < t0) return null;
        if (r < t1) t1 = r;
      }
    }
  }
  return [x0 + t0 * dx, y0 + t0 * dy, x0 + t1 * dx, y0 + t1 * dy];
}

export function renderTrajectory(doc: TrajectoryDoc): string {
  const W = 720, H = 720;
  const t = fitViewport(doc, W, H, 40);
  const f = (v: number) => v.toFixed(2);

  let s = `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${W} ${H}" font-family="Helvetica, Arial, sans-serif">\n`;
  s += `<rect width="${W}" height="${H}" fill="#fff"/>\n`;
  s += `<text x="16" y="20" font-size="12" font-weight="600" fill="#222">Minimal-time trajectory under the max-min SINR floor</text>\n`;
  const sub = `gamma* = ${fmtNum(doc.gamma_star_db)} dB · T_min = ${fmtNum(doc.t_min_s)} s · ` +
    `path ${fmtNum(doc.total_length_m / 1000)} km · seed ${doc.meta.seed} · config ${doc.meta.config_hash}`;
  s += `<text x="16" y="34" font-size="8" fill="#888">${esc(sub)}</text>\n`;

  for (const road of doc.roads) {
    const seg = clipRoad(road.rho_km * 1000, road.phi_rad, t, W, H);
    if (!seg) continue;
    s += `<line class="road" x1="${f(seg[0])}" y1="${f(seg[1])}" x2="${f(seg[2])}" y2="${f(seg[3])}" stroke="#c9c9c9" stroke-width="0.7"/>\n`;
  }

  const inFrame = (px: number, py: number) => px >= 0 && px <= W && py >= 0 && py <= H;
  for (const [x, y] of doc.tbs_m) {
    const px = t.x(x), py = t.y(y);
    if (!inFrame(px, py)) continue;
    s += `<polygon class="tbs" points="${f(px)},${f(py - 3.2)} ${f(px - 2.8)},${f(py + 2.4)} ${f(px + 2.8)},${f(py + 2.4)}" fill="#6c757d"/>\n`;
  }
  for (const [x, y] of doc.dedicated_m) {
    const px = t.x(x), py = t.y(y);
    if (!inFrame(px, py)) continue;
    s += `<circle class="dedicated" cx="${f(px)}" cy="${f(py)}" r="1.8" fill="#4361ee"/>\n`;
  }

  for (const b of doc.bs_sequence) {
    s += `<circle class="disk" cx="${f(t.x(b.x_m))}" cy="${f(t.y(b.y_m))}" r="${f(t.len(b.radius_m))}" fill="none" stroke="#d62728" stroke-width="1" stroke-dasharray="5,4"/>\n`;
  }
  for (const b of doc.bs_sequence) {
    const px = t.x(b.x_m), py = t.y(b.y_m);
    if (b.kind === "tbs") {
      s += `<polygon class="chain-tbs" points="${f(px)},${f(py - 4)} ${f(px - 3.5)},${f(py + 3)} ${f(px + 3.5)},${f(py + 3)}" fill="#343a40"/>\n`;
    } else {
      s += `<circle class="chain-dedicated" cx="${f(px)}" cy="${f(py)}" r="2.6" fill="#1d3557"/>\n`;
    }
  }

  const route = doc.waypoints_m
    .map(([x, y]) => `${f(t.x(x))},${f(t.y(y))}`).join(" ");
  s += `<polyline class="route" fill="none" stroke="#111" stroke-width="1.8" points="${route}"/>\n`;
  for (const [x, y] of doc.waypoints_m) {
    s += `<circle class="waypoint" cx="${f(t.x(x))}" cy="${f(t.y(y))}" r="1.6" fill="#111"/>\n`;
  }

  const label = (p: [number, number], name: string) => {
    const px = t.x(p[0]), py = t.y(p[1]);
    s += `<circle class="endpoint" cx="${f(px)}" cy="${f(py)}" r="4" fill="#2d6a4f"/>\n`;
    s += `<text x="${f(px + 7)}" y="${f(py + 4)}" font-size="12" font-weight="600" fill="#2d6a4f">${name}</text>\n`;
  };
  label(doc.S_m, "S");
  label(doc.D_m, "D");

  const lx = 16, ly = H - 72;
  s += `<rect x="${lx - 6}" y="${ly - 12}" width="208" height="64" rx="3" fill="#fff" fill-opacity="0.9" stroke="#ddd" stroke-width="0.6"/>\n`;
  s += `<line x1="${lx}" y1="${ly}" x2="${lx + 16}" y2="${ly}" stroke="#c9c9c9" stroke-width="0.7"/>` +
    `<text x="${lx + 20}" y="${ly + 3}" font-size="8" fill="#444">roads</text>\n`;
  s += `<polygon points="${lx + 8},${ly + 8} ${lx + 5},${ly + 14} ${lx + 11},${ly + 14}" fill="#6c757d"/>` +
    `<text x="${lx + 20}" y="${ly + 14}" font-size="8" fill="#444">terrestrial BS</text>\n`;
  s += `<circle cx="${lx + 8}" cy="${ly + 23}" r="1.8" fill="#4361ee"/>` +
    `<text x="${lx + 20}" y="${ly + 26}" font-size="8" fill="#444">dedicated BS</text>\n`;
  s += `<circle cx="${lx + 8}" cy="${ly + 35}" r="4" fill="none" stroke="#d62728" stroke-width="1" stroke-dasharray="5,4"/>` +
    `<text x="${lx + 20}" y="${ly + 38}" font-size="8" fill="#444">coverage disk at gamma*</text>\n`;
  s += `<line x1="${lx}" y1="${ly + 47}" x2="${lx + 16}" y2="${ly + 47}" stroke="#111" stroke-width="1.8"/>` +
    `<text x="${lx + 20}" y="${ly + 50}" font-size="8" fill="#444">trajectory</text>\n`;

  s += `</svg>\n`;
  return s;
}

// -- dispatcher -----------------------------------------------------------------

/** Render one figure spec to its output file; returns the SVG text. */
export function render(spec: FigureSpec): string {
  if (spec.inputs.length === 0) {
    throw new SchemaError("figure spec has no inputs");
  }
  let svg: string;
  if (spec.kind === "coverage") {
    const tables = spec.inputs.map((p) => parseTable(readFileSync(p, "utf-8"), p));
    svg = renderCoverage(tables, spec.inputs);
  } else if (spec.kind === "maxmin") {
    if (spec.inputs.length !== 1) {
      throw new SchemaError("maxmin figures take exactly one input");
    }
    const table = parseTable(readFileSync(spec.inputs[0], "utf-8"), spec.inputs[0]);
    svg = renderMaxmin(table, spec.inputs[0]);
  } else if (spec.kind === "trajectory") {
    if (spec.inputs.length !== 1) {
      throw new SchemaError("trajectory figures take exactly one input");
    }
    svg = renderTrajectory(parseTrajectory(readFileSync(spec.inputs[0], "utf-8"), spec.inputs[0]));
  } else {
    throw new SchemaError(`unknown figure kind "${spec.kind}"`);
  }
  mkdirSync(dirname(spec.output), { recursive: true });
  writeFileSync(spec.output, svg);
  return svg;
}
