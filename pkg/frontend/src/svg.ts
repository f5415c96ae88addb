/**
 * Minimal SVG plot builder: linear axes, ticks, polylines, scatter
 * markers and dashed horizontal reference lines. No DOM, no external
 * dependencies; output is a standalone SVG document string.
 */

export interface Margin {
  top: number;
  right: number;
  bottom: number;
  left: number;
}

export interface PlotOptions {
  width?: number;
  height?: number;
  margin?: Margin;
  title?: string;
  xLabel?: string;
  yLabel?: string;
  xDomain?: [number, number];
  yDomain?: [number, number];
}

export interface ReferenceLine {
  level: number;
  label: string;
}

const DEFAULTS = {
  width: 720,
  height: 440,
  margin: { top: 40, right: 24, bottom: 52, left: 72 },
};

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

export function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Round-number tick positions covering [lo, hi]. */
export function ticks(lo: number, hi: number, count = 6): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const step0 = span / Math.max(1, count);
  const mag = 10 ** Math.floor(Math.log10(step0));
  const norm = step0 / mag;
  const step = (norm >= 5 ? 5 : norm >= 2 ? 2 : 1) * mag;
  const out: number[] = [];
  for (let t = Math.ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) {
    out.push(Math.abs(t) < 1e-12 * span ? 0 : t);
  }
  return out;
}

function fmtTick(v: number): string {
  const a = Math.abs(v);
  if (a !== 0 && (a >= 1e5 || a < 1e-3)) return v.toExponential(1);
  return String(Number(v.toPrecision(6)));
}

export class Plot {
  readonly width: number;
  readonly height: number;
  readonly margin: Margin;
  private readonly title: string;
  private readonly xLabel: string;
  private readonly yLabel: string;
  private xDomain: [number, number];
  private yDomain: [number, number];
  private readonly body: string[] = [];
  private readonly legend: { label: string; color: string; dashed: boolean }[] =
    [];
  private colorIndex = 0;

  constructor(opts: PlotOptions = {}) {
    this.width = opts.width ?? DEFAULTS.width;
    this.height = opts.height ?? DEFAULTS.height;
    this.margin = opts.margin ?? { ...DEFAULTS.margin };
    this.title = opts.title ?? "";
    this.xLabel = opts.xLabel ?? "";
    this.yLabel = opts.yLabel ?? "";
    this.xDomain = opts.xDomain ?? [0, 1];
    this.yDomain = opts.yDomain ?? [0, 1];
  }

  /** Expand domains to cover the data (with a small y padding). */
  fitDomains(xs: number[], ys: number[], padFrac = 0.05): void {
    const fx = xs.filter(Number.isFinite);
    const fy = ys.filter(Number.isFinite);
    if (fx.length === 0 || fy.length === 0) {
      throw new Error("no finite data to fit plot domains");
    }
    const ySpan = Math.max(Math.max(...fy) - Math.min(...fy), 1e-9);
    this.xDomain = [Math.min(...fx), Math.max(...fx)];
    this.yDomain = [
      Math.min(...fy) - padFrac * ySpan,
      Math.max(...fy) + padFrac * ySpan,
    ];
  }

  /** Widen the y domain so the given level is visible. */
  includeY(level: number, padFrac = 0.04): void {
    const span = Math.max(this.yDomain[1] - this.yDomain[0], 1e-9);
    if (level < this.yDomain[0]) this.yDomain[0] = level - padFrac * span;
    if (level > this.yDomain[1]) this.yDomain[1] = level + padFrac * span;
  }

  get innerWidth(): number {
    return this.width - this.margin.left - this.margin.right;
  }

  get innerHeight(): number {
    return this.height - this.margin.top - this.margin.bottom;
  }

  sx(x: number): number {
    const [lo, hi] = this.xDomain;
    return this.margin.left + ((x - lo) / (hi - lo || 1)) * this.innerWidth;
  }

  sy(y: number): number {
    const [lo, hi] = this.yDomain;
    return (
      this.margin.top +
      this.innerHeight -
      ((y - lo) / (hi - lo || 1)) * this.innerHeight
    );
  }

  private nextColor(): string {
    const c = PALETTE[this.colorIndex % PALETTE.length];
    this.colorIndex += 1;
    return c;
  }

  line(xs: number[], ys: number[], label?: string, color?: string): void {
    const c = color ?? this.nextColor();
    const pts: string[] = [];
    for (let i = 0; i < xs.length; i += 1) {
      if (Number.isFinite(xs[i]) && Number.isFinite(ys[i])) {
        pts.push(`${this.sx(xs[i]).toFixed(2)},${this.sy(ys[i]).toFixed(2)}`);
      }
    }
    this.body.push(
      `<polyline fill="none" stroke="${c}" stroke-width="1.5" ` +
        `points="${pts.join(" ")}"/>`,
    );
    if (label) this.legend.push({ label, color: c, dashed: false });
  }

  scatter(
    xs: number[],
    ys: number[],
    label?: string,
    color?: string,
    r = 2.2,
  ): void {
    const c = color ?? this.nextColor();
    const dots: string[] = [];
    for (let i = 0; i < xs.length; i += 1) {
      if (Number.isFinite(xs[i]) && Number.isFinite(ys[i])) {
        dots.push(
          `<circle cx="${this.sx(xs[i]).toFixed(2)}" ` +
            `cy="${this.sy(ys[i]).toFixed(2)}" r="${r}" fill="${c}" ` +
            `fill-opacity="0.75"/>`,
        );
      }
    }
    this.body.push(dots.join(""));
    if (label) this.legend.push({ label, color: c, dashed: false });
  }

  /** Dashed horizontal reference line with a right-aligned label. */
  hline(ref: ReferenceLine, color = "#555"): void {
    this.includeY(ref.level);
    const y = this.sy(ref.level).toFixed(2);
    const x0 = this.margin.left;
    const x1 = this.width - this.margin.right;
    this.body.push(
      `<line x1="${x0}" y1="${y}" x2="${x1}" y2="${y}" stroke="${color}" ` +
        `stroke-width="1.2" stroke-dasharray="6 4"/>`,
    );
    this.body.push(
      `<text x="${x1 - 4}" y="${Number(y) - 5}" text-anchor="end" ` +
        `font-size="11" fill="${color}">${escapeXml(ref.label)}</text>`,
    );
    this.legend.push({ label: ref.label, color, dashed: true });
  }

  private axes(): string {
    const out: string[] = [];
    const x0 = this.margin.left;
    const y0 = this.margin.top + this.innerHeight;
    const x1 = this.width - this.margin.right;
    const y1 = this.margin.top;
    out.push(
      `<rect x="${x0}" y="${y1}" width="${this.innerWidth}" ` +
        `height="${this.innerHeight}" fill="none" stroke="#333"/>`,
    );
    for (const t of ticks(this.xDomain[0], this.xDomain[1])) {
      const x = this.sx(t).toFixed(2);
      out.push(
        `<line x1="${x}" y1="${y0}" x2="${x}" y2="${y0 + 5}" stroke="#333"/>`,
        `<text x="${x}" y="${y0 + 18}" text-anchor="middle" ` +
          `font-size="11">${fmtTick(t)}</text>`,
      );
    }
    for (const t of ticks(this.yDomain[0], this.yDomain[1])) {
      const y = this.sy(t).toFixed(2);
      out.push(
        `<line x1="${x0 - 5}" y1="${y}" x2="${x0}" y2="${y}" stroke="#333"/>`,
        `<text x="${x0 - 8}" y="${Number(y) + 4}" text-anchor="end" ` +
          `font-size="11">${fmtTick(t)}</text>`,
        `<line x1="${x0}" y1="${y}" x2="${x1}" y2="${y}" stroke="#eee"/>`,
      );
    }
    if (this.xLabel) {
      out.push(
        `<text x="${(x0 + x1) / 2}" y="${this.height - 10}" ` +
          `text-anchor="middle" font-size="13">${escapeXml(this.xLabel)}</text>`,
      );
    }
    if (this.yLabel) {
      const cy = (y0 + y1) / 2;
      out.push(
        `<text x="18" y="${cy}" text-anchor="middle" font-size="13" ` +
          `transform="rotate(-90 18 ${cy})">${escapeXml(this.yLabel)}</text>`,
      );
    }
    if (this.title) {
      out.push(
        `<text x="${this.width / 2}" y="24" text-anchor="middle" ` +
          `font-size="15" font-weight="bold">${escapeXml(this.title)}</text>`,
      );
    }
    return out.join("\n");
  }

  private legendBox(): string {
    if (this.legend.length === 0) return "";
    const x = this.margin.left + 10;
    let y = this.margin.top + 14;
    const out: string[] = [];
    for (const item of this.legend) {
      const dash = item.dashed ? ' stroke-dasharray="6 4"' : "";
      out.push(
        `<line x1="${x}" y1="${y - 4}" x2="${x + 24}" y2="${y - 4}" ` +
          `stroke="${item.color}" stroke-width="1.5"${dash}/>`,
        `<text x="${x + 30}" y="${y}" font-size="11">` +
          `${escapeXml(item.label)}</text>`,
      );
      y += 16;
    }
    return out.join("\n");
  }

  render(): string {
    // grid first, then data, then legend on top
    return [
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" ` +
        `height="${this.height}" viewBox="0 0 ${this.width} ${this.height}" ` +
        `font-family="Helvetica, Arial, sans-serif">`,
      `<rect width="${this.width}" height="${this.height}" fill="white"/>`,
      this.axes(),
      ...this.body,
      this.legendBox(),
      `</svg>`,
    ].join("\n");
  }
}

/** Stack independently rendered SVG panels side by side. */
export function panelRow(svgs: string[], gap = 8): string {
  const widths = svgs.map((s) => Number(/width="(\d+)"/.exec(s)?.[1] ?? 0));
  const heights = svgs.map((s) => Number(/height="(\d+)"/.exec(s)?.[1] ?? 0));
  const total = widths.reduce((a, b) => a + b, 0) + gap * (svgs.length - 1);
  const height = Math.max(...heights);
  let x = 0;
  const parts: string[] = [];
  for (let i = 0; i < svgs.length; i += 1) {
    const inner = svgs[i].replace(/^<svg[^>]*>/, "<g>").replace(/<\/svg>\s*$/, "</g>");
    parts.push(`<g transform="translate(${x} 0)">${inner}</g>`);
    x += widths[i] + gap;
  }
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${total}" ` +
    `height="${height}" viewBox="0 0 ${total} ${height}">\n` +
    parts.join("\n") +
    `\n</svg>`
  );
}
