#!/usr/bin/env node
/**
 * Usage: diracpilot-plots render --kind KIND --in PATH [PATH...] --out PATH.svg
 *
 * Kinds: density_trajectories | convergence | equivariance | pair_worldlines
 * Exit codes: 0 written, 1 bad arguments or unreadable/malformed inputs.
 */
import { writeFileSync } from "fs";

import { FigureKind, KINDS, render } from "./figures";

interface Args {
  kind: FigureKind;
  inputs: string[];
  out: string;
  title?: string;
}

export function parseArgs(argv: string[]): Args {
  if (argv[0] !== "render") {
    throw new Error("expected the 'render' subcommand");
  }
  let kind: string | undefined;
  let out: string | undefined;
  let title: string | undefined;
  const inputs: string[] = [];
  for (let i = 1; i < argv.length; i++) {
    const a = argv[i];
    if (a === "--kind") {
      kind = argv[++i];
    } else if (a === "--in") {
      while (i + 1 < argv.length && !argv[i + 1].startsWith("--")) {
        inputs.push(argv[++i]);
      }
    } else if (a === "--out") {
      out = argv[++i];
    } else if (a === "--title") {
      title = argv[++i];
    } else {
      throw new Error(`unknown argument '${a}'`);
    }
  }
  if (!kind || !(KINDS as string[]).includes(kind)) {
    throw new Error(`--kind must be one of: ${KINDS.join(", ")}`);
  }
  if (inputs.length === 0) {
    throw new Error("--in requires at least one input path");
  }
  if (!out) {
    throw new Error("--out is required");
  }
  return { kind: kind as FigureKind, inputs, out, title };
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    process.stderr.write(`argument error: ${(err as Error).message}\n`);
    return 1;
  }
  try {
    const svg = render(args.kind, args.inputs, { title: args.title });
    writeFileSync(args.out, svg);
  } catch (err) {
    process.stderr.write(`render error: ${(err as Error).message}\n`);
    return 1;
  }
  process.stdout.write(`wrote ${args.out}\n`);
  return 0;
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
