/**
 * Rendering entry points: render a FigureSpec, or sweep a results
 * directory and render every recognized CSV with default annotations.
 */
import {
  existsSync,
  mkdirSync,
  readFileSync,
  readdirSync,
  statSync,
  writeFileSync,
} from "node:fs";
import { basename, dirname, join, relative, resolve } from "node:path";

import { CsvSchemaError, CsvTable, readCsv } from "./csv.js";
import {
  Annotation,
  FigureKind,
  FigureSpec,
  profileAnnotations,
  renderFigure,
} from "./figures.js";

/** Map a CSV filename to its artifact kind; undefined when unknown. */
export function kindFromFilename(name: string): FigureKind | undefined {
  const base = basename(name);
  if (/range_doppler\.csv$/.test(base)) return "range_doppler";
  if (/range_profile\.csv$/.test(base)) return "range_profile";
  if (/constellation\.csv$/.test(base)) return "constellation";
  if (/sinr_curve\.csv$/.test(base)) return "sinr_curve";
  if (/max_range\.csv$/.test(base)) return "max_range";
  if (/detections\.csv$/.test(base)) return "detections";
  if (/validate_report\.csv$/.test(base)) return "validate";
  return undefined;
}

function defaultAnnotations(kind: FigureKind, table: CsvTable): Annotation[] {
  return kind === "range_profile" ? profileAnnotations(table) : [];
}

/** Render one spec; returns the paths of the SVG files written. */
export function render(spec: FigureSpec, outDir: string): string[] {
  if (spec.inputCsvs.length === 0) {
    throw new CsvSchemaError("figure spec lists no input CSVs");
  }
  const written: string[] = [];
  for (const csvPath of spec.inputCsvs) {
    const table = readCsv(csvPath);
    const annotations =
      spec.annotations ?? defaultAnnotations(spec.figureKind, table);
    const svg = renderFigure({ ...spec, annotations }, table);
    const out = join(outDir, `${basename(csvPath, ".csv")}.svg`);
    mkdirSync(dirname(out), { recursive: true });
    writeFileSync(out, svg, "utf-8");
    written.push(out);
  }
  return written;
}

function* walkCsvs(dir: string): Generator<string> {
  for (const entry of readdirSync(dir).sort()) {
    const p = join(dir, entry);
    if (statSync(p).isDirectory()) {
      yield* walkCsvs(p);
    } else if (entry.endsWith(".csv")) {
      yield p;
    }
  }
}

/** Render every recognized CSV under resultsDir into outDir. */
export function renderAll(resultsDir: string, outDir: string): string[] {
  if (!existsSync(resultsDir)) {
    throw new Error(`results directory not found: ${resultsDir}`);
  }
  const written: string[] = [];
  for (const csvPath of walkCsvs(resultsDir)) {
    const kind = kindFromFilename(csvPath);
    if (kind === undefined) continue;
    const rel = relative(resultsDir, csvPath);
    const target = join(outDir, dirname(rel));
    written.push(
      ...render({ inputCsvs: [csvPath], figureKind: kind }, resolve(target)),
    );
  }
  if (written.length === 0) {
    throw new Error(`no recognized CSV artifacts under ${resultsDir}`);
  }
  return written;
}

/** Parse and validate a JSON figure spec. */
export function loadSpec(path: string): FigureSpec {
  const raw = JSON.parse(readFileSync(path, "utf-8")) as Partial<FigureSpec>;
  if (!Array.isArray(raw.inputCsvs) || raw.inputCsvs.length === 0) {
    throw new CsvSchemaError(`${path}: spec needs a non-empty inputCsvs list`);
  }
  if (typeof raw.figureKind !== "string") {
    throw new CsvSchemaError(`${path}: spec needs a figureKind`);
  }
  return raw as FigureSpec;
}
