/**
 * Figure renderers, one per CSV artifact kind. All numeric content
 * (including reference levels) comes from the CSV data and its metadata
 * line; nothing domain-specific is recomputed here.
 */
import { CsvSchemaError, CsvTable, column, textColumn } from "./csv.js";
import { Plot, ReferenceLine, panelRow } from "./svg.js";

export type FigureKind =
  | "range_profile"
  | "range_doppler"
  | "constellation"
  | "sinr_curve"
  | "max_range"
  | "detections"
  | "validate";

export interface Annotation {
  /** Horizontal reference level in the plot's y units (dBm). */
  level: number;
  label: string;
}

export interface FigureSpec {
  inputCsvs: string[];
  figureKind: FigureKind;
  annotations?: Annotation[];
  title?: string;
}

function fmtDb(v: number): string {
  return `${v.toFixed(2)} dBm`;
}

/**
 * Default reference lines for a range profile, read off the metadata:
 * the analytic noise floor and the analytic per-target peak level(s).
 */
export function profileAnnotations(table: CsvTable): Annotation[] {
  const out: Annotation[] = [];
  const noise = Number(table.meta["noise_power_dbm"]);
  if (Number.isFinite(noise)) {
    out.push({ level: noise, label: `noise floor ${fmtDb(noise)}` });
  }
  const peaks = (table.meta["expected_peak_dbm"] ?? "")
    .split(";")
    .map(Number)
    .filter(Number.isFinite);
  for (const p of peaks) {
    out.push({ level: p, label: `expected peak ${fmtDb(p)}` });
  }
  return out;
}

function asRef(a: Annotation): ReferenceLine {
  return { level: a.level, label: a.label };
}

export function renderRangeProfile(
  table: CsvTable,
  annotations: Annotation[] = [],
  title = "Range profile",
): string {
  const d = column(table, "distance_m");
  const p = column(table, "power_dbm");
  const plot = new Plot({
    title,
    xLabel: "distance [m]",
    yLabel: "power [dBm]",
  });
  plot.fitDomains(d, p);
  for (const a of annotations) plot.hline(asRef(a));
  plot.line(d, p, "measured profile");
  return plot.render();
}

/** Zero-Doppler cut of a range–Doppler window trace, as a profile. */
export function renderRangeDoppler(
  table: CsvTable,
  annotations: Annotation[] = [],
  title?: string,
): string {
  const p = column(table, "range_bin");
  const q = column(table, "doppler_bin");
  const pw = column(table, "power_dbm");
  const xs: number[] = [];
  const ys: number[] = [];
  for (let i = 0; i < p.length; i += 1) {
    if (q[i] === 0) {
      xs.push(p[i]);
      ys.push(pw[i]);
    }
  }
  if (xs.length === 0) {
    throw new CsvSchemaError("no zero-Doppler bins in range-Doppler table");
  }
  const windowTag = table.meta["window"];
  const plot = new Plot({
    title:
      title ??
      (windowTag !== undefined
        ? `Range profile, window ${windowTag}`
        : "Range profile (zero Doppler)"),
    xLabel: "window-relative range bin",
    yLabel: "power [dBm]",
  });
  plot.fitDomains(xs, ys);
  const floor = Number(table.meta["noise_floor_dbm"]);
  if (Number.isFinite(floor)) {
    plot.hline({ level: floor, label: `estimated floor ${fmtDb(floor)}` });
  }
  for (const a of annotations) plot.hline(asRef(a));
  plot.line(xs, ys, "zero-Doppler cut");
  return plot.render();
}

export function renderConstellation(table: CsvTable): string {
  const kind = textColumn(table, "kind");
  const re = column(table, "re");
  const im = column(table, "im");
  const panels: string[] = [];
  for (const which of ["ici", "isi"]) {
    const xs: number[] = [];
    const ys: number[] = [];
    for (let i = 0; i < kind.length; i += 1) {
      if (kind[i] === which) {
        xs.push(re[i]);
        ys.push(im[i]);
      }
    }
    const plot = new Plot({
      width: 380,
      height: 380,
      title: which === "ici" ? "ICI samples" : "ISI samples",
      xLabel: "in-phase",
      yLabel: "quadrature",
    });
    if (xs.length > 0) {
      const r = Math.max(
        ...xs.map(Math.abs),
        ...ys.map(Math.abs),
        1e-12,
      );
      plot.fitDomains([-r, r], [-r, r], 0.02);
      plot.scatter(xs, ys);
    } else {
      plot.fitDomains([-1, 1], [-1, 1], 0.02);
    }
    panels.push(plot.render());
  }
  return panelRow(panels);
}

export function renderSinrCurve(table: CsvTable): string {
  const d = column(table, "distance_m");
  const ga = column(table, "gamma_analytic_db");
  const gs = column(table, "gamma_simulated_db");
  const gw = column(table, "gamma_sliding_db");
  const plot = new Plot({
    title: "Sensing SINR vs distance",
    xLabel: "distance [m]",
    yLabel: "SINR [dB]",
  });
  plot.fitDomains(d, [...ga, ...gs, ...gw]);
  plot.line(d, ga, "conventional (analytic)");
  plot.scatter(d, gs, "conventional (simulated)");
  plot.line(d, gw, "sliding window (analytic)");
  return plot.render();
}

export function renderMaxRange(table: CsvTable): string {
  const cp = column(table, "cp_duration_s").map((v) => v * 1e6);
  const m = column(table, "m_symbols");
  const r = column(table, "max_range_m");
  const plot = new Plot({
    title: "Maximum sensing range vs CP length",
    xLabel: "cyclic prefix duration [µs]",
    yLabel: "maximum range [m]",
  });
  plot.fitDomains(cp, r);
  for (const mv of [...new Set(m)].sort((a, b) => a - b)) {
    const xs: number[] = [];
    const ys: number[] = [];
    for (let i = 0; i < m.length; i += 1) {
      if (m[i] === mv) {
        xs.push(cp[i]);
        ys.push(r[i]);
      }
    }
    plot.line(xs, ys, `M = ${mv} symbols`);
  }
  return plot.render();
}

export function renderDetections(table: CsvTable): string {
  const d = column(table, "distance_m");
  const p = column(table, "power_dbm");
  const w = column(table, "window");
  const base = Math.min(...p) - 3;
  const plot = new Plot({
    title: "Sliding-window detections",
    xLabel: "estimated distance [m]",
    yLabel: "peak power [dBm]",
  });
  plot.fitDomains(d, [...p, base]);
  // stems make isolated detections easier to read
  for (let i = 0; i < d.length; i += 1) {
    plot.line([d[i], d[i]], [base, p[i]], undefined, "#bbb");
  }
  plot.scatter(d, p, `detections (windows ${Math.min(...w)}-${Math.max(...w)})`,
    "#1f77b4", 4);
  return plot.render();
}

export function renderValidate(table: CsvTable): string {
  const d = column(table, "distance_m");
  const e = column(table, "abs_error_db");
  const plot = new Plot({
    title: "Closed-form vs simulated SINR error",
    xLabel: "distance [m]",
    yLabel: "absolute error [dB]",
  });
  plot.fitDomains(d, [...e, 0]);
  plot.line(d, e, "|analytic - simulated|");
  return plot.render();
}

export function renderFigure(spec: FigureSpec, table: CsvTable): string {
  const ann = spec.annotations ?? [];
  switch (spec.figureKind) {
    case "range_profile":
      return renderRangeProfile(table, ann, spec.title ?? "Range profile");
    case "range_doppler":
      return renderRangeDoppler(table, ann, spec.title);
    case "constellation":
      return renderConstellation(table);
    case "sinr_curve":
      return renderSinrCurve(table);
    case "max_range":
      return renderMaxRange(table);
    case "detections":
      return renderDetections(table);
    case "validate":
      return renderValidate(table);
    default:
      throw new CsvSchemaError(`unknown figure kind '${spec.figureKind}'`);
  }
}
