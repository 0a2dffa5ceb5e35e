#!/usr/bin/env node
/**
 * aerialcov-plots <coverage|maxmin|trajectory> <input...> --out <image.svg>
 *
 * Renders the simulator CLI's CSV/JSON outputs into SVG figures.  Exit
 * codes: 0 ok, 1 schema/validation failure, 2 usage error.
 */

import { FigureKind, FigureSpec, render } from "./figures.js";
import { SchemaError } from "./schema.js";

const KINDS: FigureKind[] = ["coverage", "maxmin", "trajectory"];
const USAGE = `usage: aerialcov-plots <${KINDS.join("|")}> <input...> --out <image.svg>`;

export function parseArgs(argv: string[]): FigureSpec {
  const args = [...argv];
  const kind = args.shift();
  if (!kind || !KINDS.includes(kind as FigureKind)) {
    throw new UsageError(`expected a figure kind (${KINDS.join(", ")}), got "${kind ?? ""}"`);
  }
  let output: string | undefined;
  const inputs: string[] = [];
  while (args.length > 0) {
    const a = args.shift()!;
    if (a === "--out" || a === "-o") {
      output = args.shift();
      if (!output) throw new UsageError("--out needs a path");
    } else if (a.startsWith("-")) {
      throw new UsageError(`unknown option "${a}"`);
    } else {
      inputs.push(a);
    }
  }
  if (inputs.length === 0) throw new UsageError("no input files given");
  if (!output) throw new UsageError("--out is required");
  return { kind: kind as FigureKind, inputs, output };
}

export class UsageError extends Error {}

function main(): void {
  let spec: FigureSpec;
  try {
    spec = parseArgs(process.argv.slice(2));
  } catch (err) {
    console.error(`${(err as Error).message}\n${USAGE}`);
    process.exit(2);
  }
  try {
    render(spec);
    console.log(`wrote ${spec.output}`);
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(err.message);
      process.exit(1);
    }
    throw err;
  }
}

const isDirectRun = process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (isDirectRun) main();
