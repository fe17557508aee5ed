/**
 * Usage: node dist/cli.js --kind <cdf|si-sweep|gamma-sweep> --input <csv> --output <svg>
 */

import fs from "node:fs";
import path from "node:path";

import { SchemaError } from "./csv.js";
import { FigureKind, renderFigure } from "./figures.js";

function parseArgs(argv: string[]): Map<string, string> {
  const args = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    const value = argv[i + 1];
    if (!key?.startsWith("--") || value === undefined) {
      throw new Error(`malformed arguments near "${key ?? ""}"`);
    }
    args.set(key.slice(2), value);
  }
  return args;
}

export function main(argv: string[]): number {
  let args: Map<string, string>;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(String(err));
    return 2;
  }
  const kind = args.get("kind");
  const input = args.get("input");
  const output = args.get("output");
  if (!kind || !input || !output) {
    console.error(
      "usage: cli --kind <cdf|si-sweep|gamma-sweep> --input <csv> --output <svg>",
    );
    return 2;
  }
  if (!["cdf", "si-sweep", "gamma-sweep"].includes(kind)) {
    console.error(`unknown figure kind "${kind}"`);
    return 2;
  }
  try {
    const svg = renderFigure(kind as FigureKind, input);
    fs.mkdirSync(path.dirname(path.resolve(output)), { recursive: true });
    fs.writeFileSync(output, svg);
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      return 1;
    }
    throw err;
  }
  console.log(`wrote ${output}`);
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${path.resolve(process.argv[1])}`).href;
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
