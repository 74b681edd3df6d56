#!/usr/bin/env node
/** plots <kind> --in <csv> --out <img>
 *
 * kinds: bar (photon numbers or config probabilities), histogram
 * (improvement rates), heatmap (parameter sweep).  Exit codes: 0 on
 * success, 2 for bad arguments / missing files / schema mismatches.
 */

import { writeFileSync } from "node:fs";
import { readCsv, SchemaError } from "./csv.js";
import { FigureKind, render } from "./figures.js";

const KINDS: FigureKind[] = ["bar", "histogram", "heatmap"];
const USAGE = `usage: plots <${KINDS.join("|")}> --in <csv> --out <svg>`;

export function main(argv: string[]): number {
  const args = [...argv];
  const kind = args.shift();
  let input: string | undefined;
  let output: string | undefined;
  while (args.length > 0) {
    const flag = args.shift();
    if (flag === "--in") input = args.shift();
    else if (flag === "--out") output = args.shift();
    else {
      process.stderr.write(`unknown argument: ${flag}\n${USAGE}\n`);
      return 2;
    }
  }
  if (!kind || !KINDS.includes(kind as FigureKind) || !input || !output) {
    process.stderr.write(`${USAGE}\n`);
    return 2;
  }

  try {
    const table = readCsv(input);
    const svg = render(kind as FigureKind, table, input);
    writeFileSync(output, svg);
  } catch (err) {
    if (err instanceof SchemaError) {
      process.stderr.write(`schema error: ${err.message}\n`);
      return 2;
    }
    if (err instanceof Error && "code" in err && err.code === "ENOENT") {
      process.stderr.write(`no such file: ${input}\n`);
      return 2;
    }
    throw err;
  }
  process.stdout.write(`wrote ${output}\n`);
  return 0;
}

import { pathToFileURL } from "node:url";

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  process.exit(main(process.argv.slice(2)));
}
