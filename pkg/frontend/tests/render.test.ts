import { createHash } from "node:crypto";
import { existsSync, mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterEach, describe, expect, it } from "vitest";

import { CsvSchemaError, parseCsv, readCsv } from "../src/csv.js";
import { profileAnnotations, renderFigure } from "../src/figures.js";
import { kindFromFilename, render, renderAll } from "../src/render.js";
import { main } from "../src/cli.js";

const FIXTURES = join(__dirname, "fixtures");
const tempDirs: string[] = [];

function tmp(): string {
  const d = mkdtempSync(join(tmpdir(), "figs-"));
  tempDirs.push(d);
  return d;
}

afterEach(() => {
  while (tempDirs.length) rmSync(tempDirs.pop()!, { recursive: true, force: true });
});

describe("csv parsing", () => {
  it("reads metadata, header and numeric rows", () => {
    const t = readCsv(join(FIXTURES, "fig6_range_profile.csv"));
    expect(t.columns).toEqual(["bin", "distance_m", "power_dbm"]);
    expect(t.rows).toBe(2048);
    expect(Number(t.meta["num_subcarriers"])).toBe(2048);
    expect(Number(t.meta["noise_power_dbm"])).toBeCloseTo(-87.17, 2);
  });

  it("rejects an empty csv", () => {
    expect(() => parseCsv("", "empty")).toThrow(CsvSchemaError);
    expect(() => parseCsv("a,b\n", "headeronly")).toThrow(CsvSchemaError);
  });

  it("rejects ragged rows", () => {
    expect(() => parseCsv("a,b\n1,2\n3\n")).toThrow(CsvSchemaError);
  });
});

describe("figure kinds", () => {
  it.each([
    ["range_profile.csv", "range_profile"],
    ["window_03_range_doppler.csv", "range_doppler"],
    ["constellation.csv", "constellation"],
    ["sinr_curve.csv", "sinr_curve"],
    ["max_range.csv", "max_range"],
    ["detections.csv", "detections"],
    ["validate_report.csv", "validate"],
  ])("recognizes %s", (name, kind) => {
    expect(kindFromFilename(name)).toBe(kind);
  });

  it("ignores unknown csvs", () => {
    expect(kindFromFilename("notes.csv")).toBeUndefined();
  });
});

describe("range profile rendering", () => {
  it("draws the two annotated dashed reference lines at the analytic levels", () => {
    const t = readCsv(join(FIXTURES, "fig6_range_profile.csv"));
    const ann = profileAnnotations(t);
    const levels = ann.map((a) => a.level);
    expect(levels.some((v) => Math.abs(v - -20.4) < 0.05)).toBe(true);
    expect(levels.some((v) => Math.abs(v - -87.17) < 0.05)).toBe(true);

    const svg = renderFigure(
      { inputCsvs: [], figureKind: "range_profile", annotations: ann },
      t,
    );
    const dashed = svg.match(/<line [^>]*stroke-dasharray="6 4"/g) ?? [];
    expect(dashed.length).toBeGreaterThanOrEqual(2);
    expect(svg).toContain("expected peak -20.40 dBm");
    expect(svg).toContain("noise floor -87.17 dBm");
  });

  it("renders the beyond-CP profile with its degraded peak annotation", () => {
    const t = readCsv(join(FIXTURES, "fig7_range_profile.csv"));
    const ann = profileAnnotations(t);
    expect(ann.some((a) => Math.abs(a.level - -62.05) < 0.05)).toBe(true);
    const svg = renderFigure(
      { inputCsvs: [], figureKind: "range_profile", annotations: ann },
      t,
    );
    expect(svg).toContain("<svg");
    expect(svg).toContain("</svg>");
  });
});

describe("other renderers", () => {
  it.each([
    ["constellation.csv", "constellation"],
    ["sinr_curve.csv", "sinr_curve"],
    ["max_range.csv", "max_range"],
    ["detections.csv", "detections"],
    ["window_00_range_doppler.csv", "range_doppler"],
    ["validate_report.csv", "validate"],
  ] as const)("renders %s without error", (name, kind) => {
    const t = readCsv(join(FIXTURES, name));
    const svg = renderFigure({ inputCsvs: [], figureKind: kind }, t);
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svg.length).toBeGreaterThan(500);
  });

  it("constellation renders two panels", () => {
    const t = readCsv(join(FIXTURES, "constellation.csv"));
    const svg = renderFigure({ inputCsvs: [], figureKind: "constellation" }, t);
    expect(svg).toContain("ICI samples");
    expect(svg).toContain("ISI samples");
  });

  it("max-range plot has one curve per symbol count", () => {
    const t = readCsv(join(FIXTURES, "max_range.csv"));
    const svg = renderFigure({ inputCsvs: [], figureKind: "max_range" }, t);
    expect(svg).toContain("M = 14 symbols");
    expect(svg).toContain("M = 28 symbols");
  });
});

describe("render() and renderAll()", () => {
  it("writes one svg per input and never mutates the csv", () => {
    const src = join(FIXTURES, "fig6_range_profile.csv");
    const before = createHash("sha256").update(readFileSync(src)).digest("hex");
    const out = tmp();
    const written = render(
      { inputCsvs: [src], figureKind: "range_profile" },
      out,
    );
    expect(written).toHaveLength(1);
    expect(existsSync(written[0])).toBe(true);
    const again = render(
      { inputCsvs: [src], figureKind: "range_profile" },
      out,
    );
    expect(again).toEqual(written);
    const after = createHash("sha256").update(readFileSync(src)).digest("hex");
    expect(after).toBe(before);
  });

  it("errors on an empty csv and writes no file", () => {
    const dir = tmp();
    const bad = join(dir, "range_profile.csv");
    writeFileSync(bad, "");
    const out = join(dir, "figs");
    expect(() =>
      render({ inputCsvs: [bad], figureKind: "range_profile" }, out),
    ).toThrow(CsvSchemaError);
    expect(existsSync(join(out, "range_profile.svg"))).toBe(false);
  });

  it("sweeps a results tree and renders every recognized artifact", () => {
    const out = tmp();
    const written = renderAll(FIXTURES, out);
    expect(written.length).toBe(8);
    for (const p of written) expect(readFileSync(p, "utf-8")).toContain("</svg>");
  });
});

describe("acceptance", () => {
  it("criterion 13: every artifact renders; fig6 carries both dashed analytic lines", () => {
    const out = tmp();
    let ok = false;
    let detail = "";
    try {
      const written = renderAll(FIXTURES, out);
      const fig6 = readFileSync(
        written.find((p) => p.endsWith("fig6_range_profile.svg"))!,
        "utf-8",
      );
      const dashed = (fig6.match(/stroke-dasharray="6 4"/g) ?? []).length;
      const hasPeak = fig6.includes("expected peak -20.40 dBm");
      const hasFloor = fig6.includes("noise floor -87.17 dBm");
      ok = written.length === 8 && dashed >= 2 && hasPeak && hasFloor;
      detail =
        `${written.length} artifacts rendered; fig6 dashed reference ` +
        `lines: peak=${hasPeak}, floor=${hasFloor}`;
    } catch (err) {
      detail = err instanceof Error ? err.message : String(err);
    }
    console.log(`criterion 13: ${ok ? "PASS" : "FAIL"} - ${detail}`);
    expect(ok).toBe(true);
  });
});

describe("cli", () => {
  it("renders via --all and returns 0", () => {
    const out = tmp();
    expect(main(["render", "--all", FIXTURES, "--out", out])).toBe(0);
  });

  it("rejects conflicting or missing modes", () => {
    expect(main([])).toBe(2);
    expect(main(["--spec", "a.json", "--all", "dir"])).toBe(2);
    expect(main(["--frobnicate"])).toBe(2);
  });

  it("renders from a json spec with explicit annotations", () => {
    const dir = tmp();
    const spec = {
      inputCsvs: [join(FIXTURES, "fig6_range_profile.csv")],
      figureKind: "range_profile",
      annotations: [{ level: -20.4, label: "expected peak -20.40 dBm" }],
    };
    const specPath = join(dir, "spec.json");
    writeFileSync(specPath, JSON.stringify(spec));
    const out = join(dir, "figs");
    expect(main(["--spec", specPath, "--out", out])).toBe(0);
    const svg = readFileSync(join(out, "fig6_range_profile.svg"), "utf-8");
    expect(svg).toContain("expected peak -20.40 dBm");
  });
});
