#!/usr/bin/env node
/**
 * CLI: render --spec <file.json> [--out <dir>]
 *      render --all <results-dir> [--out <dir>]
 *
 * Prints the path of every SVG written. Exits 2 on usage or input
 * errors.
 */
import { loadSpec, render, renderAll } from "./render.js";

const USAGE = `usage:
  ofdm-isac-render render --spec <figure-spec.json> [--out <dir>]
  ofdm-isac-render render --all <results-dir> [--out <dir>]

The leading 'render' token is optional. Default output directory: figures/`;

export function main(argv: string[]): number {
  const args = [...argv];
  if (args[0] === "render") args.shift();
  let specPath: string | undefined;
  let allDir: string | undefined;
  let outDir = "figures";
  for (let i = 0; i < args.length; i += 1) {
    switch (args[i]) {
      case "--spec":
        specPath = args[++i];
        break;
      case "--all":
        allDir = args[++i];
        break;
      case "--out":
        outDir = args[++i];
        break;
      case "-h":
      case "--help":
        console.log(USAGE);
        return 0;
      default:
        console.error(`unknown argument '${args[i]}'\n${USAGE}`);
        return 2;
    }
  }
  if ((specPath === undefined) === (allDir === undefined)) {
    console.error(`exactly one of --spec or --all is required\n${USAGE}`);
    return 2;
  }
  try {
    const written = specPath
      ? render(loadSpec(specPath), outDir)
      : renderAll(allDir!, outDir);
    for (const p of written) console.log(p);
    return 0;
  } catch (err) {
    console.error(err instanceof Error ? err.message : String(err));
    return 2;
  }
}

if (import.meta.url === `file://${process.argv[1]}`) {
  process.exit(main(process.argv.slice(2)));
}
