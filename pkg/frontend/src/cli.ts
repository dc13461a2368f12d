#!/usr/bin/env node
/**
 * plots <figure-kind> --in <csv...> --out <img> [--log-color] [--log-y]
 *
 * Renders one of the simulator's CSV outputs to an SVG image. Figure
 * kinds: spectra, chain_diag, population, fieldmap, couplings.
 * Exit codes: 0 success, 1 schema or usage error.
 */

import { writeFileSync } from "fs";

import { readCsv, SchemaError } from "./csv.js";
import { EXPECTED_COLUMNS, FigureKind, render, StyleOptions } from "./render.js";

const KINDS = Object.keys(EXPECTED_COLUMNS) as FigureKind[];

interface CliArgs {
  kind: FigureKind;
  inputs: string[];
  out: string;
  style: StyleOptions;
}

export function parseArgs(argv: string[]): CliArgs {
  if (argv.length === 0) {
    throw new Error(`usage: plots <${KINDS.join("|")}> --in <csv...> --out <img>`);
  }
  const kind = argv[0] as FigureKind;
  if (!KINDS.includes(kind)) {
    throw new Error(`unknown figure kind '${argv[0]}'; expected one of ${KINDS.join(", ")}`);
  }
  const inputs: string[] = [];
  let out = "";
  const style: StyleOptions = {};
  let i = 1;
  while (i < argv.length) {
    const arg = argv[i];
    if (arg === "--in") {
      i++;
      while (i < argv.length && !argv[i].startsWith("--")) inputs.push(argv[i++]);
    } else if (arg === "--out") {
      out = argv[++i] ?? "";
      i++;
    } else if (arg === "--log-color") {
      style.logColor = true;
      i++;
    } else if (arg === "--log-y") {
      style.logY = true;
      i++;
    } else {
      throw new Error(`unknown argument '${arg}'`);
    }
  }
  if (inputs.length === 0) throw new Error("no input CSV given (--in)");
  if (!out) throw new Error("no output image given (--out)");
  return { kind, inputs, out, style };
}

export function main(argv: string[]): number {
  let args: CliArgs;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error((err as Error).message);
    return 1;
  }
  try {
    const inputs = args.inputs.map(readCsv);
    const svg = render({ kind: args.kind, inputs, style: args.style });
    writeFileSync(args.out, svg);
    console.log(`wrote ${args.out}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
    } else {
      console.error((err as Error).message);
    }
    return 1;
  }
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
