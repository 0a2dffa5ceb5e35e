/**
 * Parsers and validators for the simulator CLI's file contracts.
 *
 * Two formats exist: CSV with `#`-prefixed metadata lines (coverage and
 * max-min sweeps) and a single JSON document (trajectory demo).  Figures
 * only ever read these files — no physics is recomputed here.
 */

/** Raised when an input does not match the expected schema. */
export class SchemaError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SchemaError";
  }
}

/** Metadata carried in the `#` header of every CSV the CLI writes. */
export interface FileMeta {
  configHash: string;
  seed: number;
  toolVersion: string;
  sweepKeys: string[];
}

/** One parsed CSV: metadata, column names, and numeric rows. */
export interface Table {
  meta: FileMeta;
  columns: string[];
  rows: number[][];
}

function parseMeta(headerLines: string[], source: string): FileMeta {
  const kv = new Map<string, string[]>();
  for (const line of headerLines) {
    const body = line.replace(/^#\s*/, "");
    const eq = body.indexOf("=");
    if (eq < 0) continue;
    const key = body.slice(0, eq).trim();
    const val = body.slice(eq + 1).trim();
    kv.set(key, [...(kv.get(key) ?? []), val]);
  }
  for (const required of ["config_hash", "seed", "tool_version"]) {
    if (!kv.has(required)) {
      throw new SchemaError(`${source}: header is missing "${required}"`);
    }
  }
  return {
    configHash: kv.get("config_hash")![0],
    seed: Number(kv.get("seed")![0]),
    toolVersion: kv.get("tool_version")![0],
    sweepKeys: kv.get("sweep_key") ?? [],
  };
}

function parseNumber(raw: string, source: string, line: number): number {
  if (raw === "nan") return NaN;
  const v = Number(raw);
  if (raw === "" || Number.isNaN(v)) {
    throw new SchemaError(`${source}: non-numeric cell "${raw}" on row ${line}`);
  }
  return v;
}

/** Parse a CLI CSV (metadata header + column row + numeric rows). */
export function parseTable(text: string, source = "input"): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  const headerLines = lines.filter((l) => l.startsWith("#"));
  const dataLines = lines.filter((l) => !l.startsWith("#"));
  if (dataLines.length < 2) {
    throw new SchemaError(`${source}: expected a column row and at least one data row`);
  }
  const meta = parseMeta(headerLines, source);
  const columns = dataLines[0].split(",").map((c) => c.trim());
  const rows = dataLines.slice(1).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== columns.length) {
      throw new SchemaError(
        `${source}: row ${i + 1} has ${cells.length} cells, expected ${columns.length}`);
    }
    return cells.map((c) => parseNumber(c.trim(), source, i + 1));
  });
  return { meta, columns, rows };
}

/** Assert the table carries every column a figure kind needs. */
export function requireColumns(table: Table, needed: string[], source: string): void {
  for (const col of needed) {
    if (!table.columns.includes(col)) {
      throw new SchemaError(`${source}: missing column "${col}"`);
    }
  }
}

/** Column values by name. */
export function column(table: Table, name: string): number[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) throw new SchemaError(`missing column "${name}"`);
  return table.rows.map((r) => r[idx]);
}

/**
 * Overlaid series must come from the same configuration and tool: their
 * header hashes have to agree, otherwise the curves are not comparable.
 */
export function checkOverlay(tables: Table[], sources: string[]): void {
  if (tables.length < 2) return;
  const first = tables[0].meta;
  for (let i = 1; i < tables.length; i++) {
    const m = tables[i].meta;
    if (m.configHash !== first.configHash) {
      throw new SchemaError(
        `${sources[i]}: config_hash ${m.configHash} does not match ` +
        `${sources[0]} (${first.configHash}); refusing to overlay`);
    }
    if (m.toolVersion !== first.toolVersion) {
      throw new SchemaError(
        `${sources[i]}: tool_version ${m.toolVersion} does not match ` +
        `${sources[0]} (${first.toolVersion}); refusing to overlay`);
    }
  }
}

/** One base station on the solved relay chain. */
export interface ChainStation {
  kind: "tbs" | "dedicated";
  x_m: number;
  y_m: number;
  radius_m: number;
}

/** The trajectory-demo JSON document. */
export interface TrajectoryDoc {
  meta: { config_hash: string; seed: number; tool_version: string };
  window_half_side_km: number;
  S_m: [number, number];
  D_m: [number, number];
  v_mps: number;
  gamma_star_db: number;
  radii_m: { tbs: number; dedicated: number };
  tbs_m: [number, number][];
  dedicated_m: [number, number][];
  roads: { rho_km: number; phi_rad: number }[];
  bs_sequence: ChainStation[];
  waypoints_m: [number, number][];
  t_min_s: number;
  total_length_m: number;
}

const TRAJECTORY_FIELDS: (keyof TrajectoryDoc)[] = [
  "meta", "window_half_side_km", "S_m", "D_m", "v_mps", "gamma_star_db",
  "radii_m", "tbs_m", "dedicated_m", "roads", "bs_sequence",
  "waypoints_m", "t_min_s", "total_length_m",
];

/** Parse and structurally validate a trajectory-demo JSON document. */
export function parseTrajectory(text: string, source = "input"): TrajectoryDoc {
  let doc: Record<string, unknown>;
  try {
    doc = JSON.parse(text);
  } catch (err) {
    throw new SchemaError(`${source}: not valid JSON (${(err as Error).message})`);
  }
  for (const field of TRAJECTORY_FIELDS) {
    if (!(field in doc)) {
      throw new SchemaError(`${source}: missing field "${field}"`);
    }
  }
  const t = doc as unknown as TrajectoryDoc;
  if (t.waypoints_m.length < 2) {
    throw new SchemaError(`${source}: waypoints_m must hold at least S and D`);
  }
  if (t.bs_sequence.length < 1) {
    throw new SchemaError(`${source}: bs_sequence is empty`);
  }
  for (const b of t.bs_sequence) {
    if (b.kind !== "tbs" && b.kind !== "dedicated") {
      throw new SchemaError(`${source}: unknown station kind "${b.kind}"`);
    }
  }
  return t;
}
