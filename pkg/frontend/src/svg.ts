/**
 * Hand-rolled SVG chart scaffolding: escaping, tick placement, and the
 * shared axes/legend frame used by the line-chart figure kinds.
 */

export function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function fmtNum(v: number): string {
  if (Number.isNaN(v)) return "nan";
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1000 || a < 0.01) return v.toExponential(1);
  return Number(v.toPrecision(4)).toString();
}

/** Round tick positions covering [min, max] with ~count steps. */
export function niceTicks(min: number, max: number, count: number): number[] {
  const range = max - min || 1;
  const rough = range / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rough)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((n) => n >= rough) ?? rough;
  const start = Math.ceil(min / step) * step;
  const ticks: number[] = [];
  for (let v = start; v <= max + step * 1e-2; v += step) ticks.push(v);
  return ticks;
}

/** One curve on a line chart. */
export interface Series {
  x: number[];
  y: number[];
  color: string;
  label: string;
  width?: number;
  dash?: string;
  /** y-band drawn under the curve (confidence interval). */
  band?: { lo: number[]; hi: number[] };
  /** draw point markers on the curve. */
  markers?: boolean;
  /** attach to the right-hand axis instead of the left. */
  rightAxis?: boolean;
}

export interface ChartOpts {
  title: string;
  subtitle?: string;
  xLabel: string;
  yLabel: string;
  rightYLabel?: string;
  series: Series[];
  width?: number;
  height?: number;
}

const FONT = "Helvetica, Arial, sans-serif";

interface Scale {
  (v: number): number;
}

function linearScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0 || 1;
  return (v: number) => r0 + ((v - d0) / span) * (r1 - r0);
}

function finite(values: number[]): number[] {
  return values.filter((v) => Number.isFinite(v));
}

/** Shared line-chart builder: axes, grid, ticks, legend, series. */
export function lineChart(opts: ChartOpts): string {
  const W = opts.width ?? 720;
  const H = opts.height ?? 320;
  const hasRight = opts.series.some((s) => s.rightAxis);
  const ml = 62, mr = hasRight ? 62 : 24, mt = 40, mb = 48;
  const pw = W - ml - mr;
  const ph = H - mt - mb;

  const xs = finite(opts.series.flatMap((s) => s.x));
  const xMin = Math.min(...xs), xMax = Math.max(...xs);
  const leftSeries = opts.series.filter((s) => !s.rightAxis);
  const rightSeries = opts.series.filter((s) => s.rightAxis);
  const leftVals = finite(leftSeries.flatMap((s) =>
    [...s.y, ...(s.band ? [...s.band.lo, ...s.band.hi] : [])]));
  const rightVals = finite(rightSeries.flatMap((s) => s.y));
  const pad = (lo: number, hi: number): [number, number] => {
    const d = (hi - lo || Math.abs(hi) || 1) * 0.06;
    return [lo - d, hi + d];
  };
  const [yMin, yMax] = pad(Math.min(...leftVals), Math.max(...leftVals));
  const xOf = linearScale(xMin, xMax, ml, ml + pw);
  const yOf = linearScale(yMin, yMax, mt + ph, mt);
  let rYOf: Scale = () => mt + ph;
  let rMin = 0, rMax = 1;
  if (rightSeries.length > 0) {
    [rMin, rMax] = pad(Math.min(...rightVals), Math.max(...rightVals));
    rYOf = linearScale(rMin, rMax, mt + ph, mt);
  }

  let s = `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${W} ${H}" font-family="${FONT}">\n`;
  s += `<rect width="${W}" height="${H}" fill="#fff"/>\n`;
  s += `<text x="${ml}" y="18" font-size="12" font-weight="600" fill="#222">${esc(opts.title)}</text>\n`;
  if (opts.subtitle) {
    s += `<text x="${ml}" y="31" font-size="8" fill="#888">${esc(opts.subtitle)}</text>\n`;
  }

  const yTicks = niceTicks(yMin, yMax, 5);
  for (const v of yTicks) {
    const y = yOf(v).toFixed(1);
    s += `<line x1="${ml}" y1="${y}" x2="${ml + pw}" y2="${y}" stroke="#eee" stroke-width="0.6"/>\n`;
    s += `<text x="${ml - 5}" y="${(yOf(v) + 3).toFixed(1)}" text-anchor="end" font-size="8" fill="#555">${esc(fmtNum(v))}</text>\n`;
  }
  const xTicks = niceTicks(xMin, xMax, 7);
  for (const v of xTicks) {
    const x = xOf(v).toFixed(1);
    s += `<line x1="${x}" y1="${mt + ph}" x2="${x}" y2="${mt + ph + 3}" stroke="#333" stroke-width="0.6"/>\n`;
    s += `<text x="${x}" y="${mt + ph + 13}" text-anchor="middle" font-size="8" fill="#555">${esc(fmtNum(v))}</text>\n`;
  }
  if (rightSeries.length > 0) {
    for (const v of niceTicks(rMin, rMax, 5)) {
      const y = (rYOf(v) + 3).toFixed(1);
      s += `<text x="${ml + pw + 5}" y="${y}" text-anchor="start" font-size="8" fill="#555">${esc(fmtNum(v))}</text>\n`;
    }
  }

  for (const sr of opts.series) {
    const yFn = sr.rightAxis ? rYOf : yOf;
    const pts = sr.x.map((xv, i) => [xv, sr.y[i]] as const)
      .filter(([, yv]) => Number.isFinite(yv));
    if (sr.band) {
      const fwd = pts.map(([xv], i) => `${xOf(xv).toFixed(1)},${yFn(sr.band!.lo[i]).toFixed(1)}`);
      const bwd = pts.map(([xv], i) => `${xOf(xv).toFixed(1)},${yFn(sr.band!.hi[i]).toFixed(1)}`).reverse();
      s += `<polygon class="ci-band" fill="${sr.color}" opacity="0.15" points="${[...fwd, ...bwd].join(" ")}"/>\n`;
    }
    const poly = pts.map(([xv, yv]) => `${xOf(xv).toFixed(1)},${yFn(yv).toFixed(1)}`).join(" ");
    s += `<polyline class="series" fill="none" stroke="${sr.color}" stroke-width="${sr.width ?? 1.4}"` +
      `${sr.dash ? ` stroke-dasharray="${sr.dash}"` : ""} points="${poly}"/>\n`;
    if (sr.markers) {
      for (const [xv, yv] of pts) {
        s += `<circle class="series-marker" cx="${xOf(xv).toFixed(1)}" cy="${yFn(yv).toFixed(1)}" r="2.2" fill="${sr.color}"/>\n`;
      }
    }
  }

  s += `<line x1="${ml}" y1="${mt}" x2="${ml}" y2="${mt + ph}" stroke="#333" stroke-width="0.8"/>\n`;
  s += `<line x1="${ml}" y1="${mt + ph}" x2="${ml + pw}" y2="${mt + ph}" stroke="#333" stroke-width="0.8"/>\n`;
  if (hasRight) {
    s += `<line x1="${ml + pw}" y1="${mt}" x2="${ml + pw}" y2="${mt + ph}" stroke="#333" stroke-width="0.8"/>\n`;
  }
  s += `<text x="${ml + pw / 2}" y="${H - 8}" text-anchor="middle" font-size="9" fill="#444">${esc(opts.xLabel)}</text>\n`;
  s += `<text x="14" y="${mt + ph / 2}" text-anchor="middle" font-size="9" fill="#444" transform="rotate(-90,14,${mt + ph / 2})">${esc(opts.yLabel)}</text>\n`;
  if (opts.rightYLabel) {
    s += `<text x="${W - 14}" y="${mt + ph / 2}" text-anchor="middle" font-size="9" fill="#444" transform="rotate(90,${W - 14},${mt + ph / 2})">${esc(opts.rightYLabel)}</text>\n`;
  }

  const lx = ml + 8;
  let ly = mt + 10;
  for (const sr of opts.series) {
    s += `<line x1="${lx}" y1="${ly}" x2="${lx + 16}" y2="${ly}" stroke="${sr.color}" stroke-width="${sr.width ?? 1.4}"${sr.dash ? ` stroke-dasharray="${sr.dash}"` : ""}/>\n`;
    s += `<text class="legend" x="${lx + 20}" y="${ly + 3}" font-size="8" fill="#444">${esc(sr.label)}</text>\n`;
    ly += 11;
  }

  s += `</svg>\n`;
  return s;
}
