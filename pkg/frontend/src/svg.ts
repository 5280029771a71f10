/**
 * Minimal deterministic SVG assembly.  Pure string building: no dates, no
 * randomness, fixed float formatting, so identical inputs give identical
 * bytes.
 */

export const WIDTH = 520;
export const HEIGHT = 380;
export const MARGIN = { left: 64, right: 20, top: 34, bottom: 46 };

/** Fixed-precision coordinate formatting (trailing zeros trimmed). */
export function fmt(x: number): string {
  if (!Number.isFinite(x)) throw new Error(`cannot format ${x}`);
  const s = x.toFixed(3);
  return s.replace(/\.?0+$/, "") || "0";
}

/** Short tick-label formatting. */
export function label(x: number): string {
  if (x === 0) return "0";
  const abs = Math.abs(x);
  if (abs >= 0.01 && abs < 10000) {
    return String(Number(x.toPrecision(4)));
  }
  return x.toExponential(1).replace("e-", "e-").replace("e+", "e");
}

export interface Scale {
  (value: number): number;
  domain: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const scale = ((value: number) => r0 + ((value - d0) / span) * (r1 - r0)) as Scale;
  scale.domain = domain;
  return scale;
}

export function ticks(domain: [number, number], count = 5): number[] {
  const [lo, hi] = domain;
  const out: number[] = [];
  for (let i = 0; i < count; i++) out.push(lo + ((hi - lo) * i) / (count - 1));
  return out;
}

/** Integer tick positions with a uniform step, at most maxCount of them. */
export function integerTicks(domain: [number, number], maxCount = 6): number[] {
  const lo = Math.ceil(domain[0]);
  const hi = Math.floor(domain[1]);
  const step = Math.max(1, Math.ceil((hi - lo) / (maxCount - 1)));
  const out: number[] = [];
  for (let v = lo; v <= hi; v += step) out.push(v);
  return out;
}

export class SvgBuilder {
  private parts: string[] = [];

  constructor(title: string) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
        `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">`,
      `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
      `<text x="${WIDTH / 2}" y="20" text-anchor="middle" font-size="14">${escapeXml(title)}</text>`,
    );
  }

  raw(element: string): this {
    this.parts.push(element);
    return this;
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke = "#444", width = 1, dash = ""): this {
    const dashAttr = dash === "" ? "" : ` stroke-dasharray="${dash}"`;
    this.parts.push(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" ` +
        `stroke="${stroke}" stroke-width="${width}"${dashAttr}/>`,
    );
    return this;
  }

  circle(cx: number, cy: number, r: number, fill: string, stroke = "none"): this {
    this.parts.push(
      `<circle cx="${fmt(cx)}" cy="${fmt(cy)}" r="${fmt(r)}" fill="${fill}" stroke="${stroke}"/>`,
    );
    return this;
  }

  rect(x: number, y: number, w: number, h: number, fill: string): this {
    this.parts.push(
      `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" fill="${fill}"/>`,
    );
    return this;
  }

  path(d: string, stroke: string, fill = "none", width = 1.5, dash = ""): this {
    const dashAttr = dash === "" ? "" : ` stroke-dasharray="${dash}"`;
    this.parts.push(
      `<path d="${d}" stroke="${stroke}" fill="${fill}" stroke-width="${width}"${dashAttr}/>`,
    );
    return this;
  }

  polyline(points: [number, number][], stroke: string, width = 1.5, dash = ""): this {
    const coords = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    const dashAttr = dash === "" ? "" : ` stroke-dasharray="${dash}"`;
    this.parts.push(
      `<polyline points="${coords}" fill="none" stroke="${stroke}" stroke-width="${width}"${dashAttr}/>`,
    );
    return this;
  }

  text(x: number, y: number, content: string, anchor = "middle", size = 11, fill = "#222"): this {
    this.parts.push(
      `<text x="${fmt(x)}" y="${fmt(y)}" text-anchor="${anchor}" font-size="${size}" ` +
        `fill="${fill}">${escapeXml(content)}</text>`,
    );
    return this;
  }

  /** Axis frame with tick marks and labels on the plot rectangle. */
  axes(xScale: Scale, yScale: Scale, xLabel: string, yLabel: string,
       xTickLabel: (v: number) => string = label,
       yTickLabel: (v: number) => string = label,
       xTicks?: number[], yTicks?: number[]): this {
    const x0 = MARGIN.left;
    const x1 = WIDTH - MARGIN.right;
    const y0 = HEIGHT - MARGIN.bottom;
    const y1 = MARGIN.top;
    this.line(x0, y0, x1, y0).line(x0, y0, x0, y1);
    for (const v of xTicks ?? ticks(xScale.domain)) {
      const x = xScale(v);
      this.line(x, y0, x, y0 + 4);
      this.text(x, y0 + 17, xTickLabel(v));
    }
    for (const v of yTicks ?? ticks(yScale.domain)) {
      const y = yScale(v);
      this.line(x0 - 4, y, x0, y);
      this.text(x0 - 7, y + 3.5, yTickLabel(v), "end");
    }
    this.text((x0 + x1) / 2, HEIGHT - 10, xLabel);
    this.parts.push(
      `<text x="16" y="${fmt((y0 + y1) / 2)}" text-anchor="middle" font-size="11" fill="#222" ` +
        `transform="rotate(-90 16 ${fmt((y0 + y1) / 2)})">${escapeXml(yLabel)}</text>`,
    );
    return this;
  }

  render(): string {
    return [...this.parts, "</svg>"].join("\n") + "\n";
  }
}

function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Diverging blue-white-red map for values around a pivot (tau1 around 1). */
export function divergingColor(value: number, pivot: number, span: number): string {
  const t = Math.max(-1, Math.min(1, (value - pivot) / span));
  const level = Math.round(Math.abs(t) * 200);
  if (t < 0) {
    return `rgb(${255 - level},${255 - Math.round(level / 2)},255)`;
  }
  return `rgb(255,${255 - Math.round(level / 2)},${255 - level})`;
}
