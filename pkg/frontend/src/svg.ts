// Just enough SVG to draw line charts and heatmaps as plain strings.
// Coordinates are rounded to 1/100 px so output is deterministic.

export function fmt(x: number): string {
  const r = Math.round(x * 100) / 100;
  return Object.is(r, -0) ? "0" : String(r);
}

export type Scale = (x: number) => number;

export function linearScale(
  d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0;
  const k = span === 0 ? 0 : (r1 - r0) / span;
  return (x) => r0 + (x - d0) * k;
}

export function clamp(x: number, lo: number, hi: number): number {
  return Math.min(hi, Math.max(lo, x));
}

export function tag(
  name: string, attrs: Record<string, string | number>,
  body = ""): string {
  const parts = Object.entries(attrs)
    .map(([k, v]) => ` ${k}="${v}"`)
    .join("");
  return body === ""
    ? `<${name}${parts}/>`
    : `<${name}${parts}>${body}</${name}>`;
}

export function polyline(
  pts: Array<[number, number]>,
  attrs: Record<string, string | number>): string {
  const points = pts.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
  return tag("polyline", { points, fill: "none", ...attrs });
}

export function polygon(
  pts: Array<[number, number]>,
  attrs: Record<string, string | number>): string {
  const points = pts.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
  return tag("polygon", { points, ...attrs });
}

export function text(
  x: number, y: number, label: string,
  attrs: Record<string, string | number> = {}): string {
  const safe = label.replace(/&/g, "&amp;").replace(/</g, "&lt;");
  return tag("text", {
    x: fmt(x), y: fmt(y), "font-family": "sans-serif",
    "font-size": 11, fill: "#333", ...attrs,
  }, safe);
}

export function ticks(lo: number, hi: number, count: number): number[] {
  if (!(hi > lo)) return [lo];
  const raw = (hi - lo) / Math.max(1, count);
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const norm = raw / mag;
  const step = (norm >= 5 ? 5 : norm >= 2 ? 2 : 1) * mag;
  const out: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9;
       v += step) {
    out.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return out;
}

export function tickLabel(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(0);
  return String(Math.round(v * 1000) / 1000);
}

export interface Frame {
  left: number;
  top: number;
  width: number;
  height: number;
  x: Scale;
  y: Scale;
}

/** Plot frame with the y axis growing upward inside the box. */
export function frame(
  left: number, top: number, width: number, height: number,
  xDomain: [number, number], yDomain: [number, number]): Frame {
  return {
    left, top, width, height,
    x: linearScale(xDomain[0], xDomain[1], left, left + width),
    y: linearScale(yDomain[0], yDomain[1], top + height, top),
  };
}

export function axes(
  f: Frame, xDomain: [number, number], yDomain: [number, number],
  opts: { xLabel?: string; yLabel?: string; xTicks?: boolean } = {}):
  string {
  const showX = opts.xTicks !== false;
  const pieces: string[] = [];
  pieces.push(tag("rect", {
    x: fmt(f.left), y: fmt(f.top), width: fmt(f.width),
    height: fmt(f.height), fill: "none", stroke: "#888",
    "stroke-width": 1,
  }));
  for (const v of ticks(yDomain[0], yDomain[1], 5)) {
    const py = f.y(v);
    pieces.push(tag("line", {
      x1: fmt(f.left - 4), y1: fmt(py), x2: fmt(f.left), y2: fmt(py),
      stroke: "#888",
    }));
    pieces.push(text(f.left - 7, py + 3.5, tickLabel(v),
                     { "text-anchor": "end" }));
  }
  if (showX) {
    for (const v of ticks(xDomain[0], xDomain[1], 6)) {
      const px = f.x(v);
      const base = f.top + f.height;
      pieces.push(tag("line", {
        x1: fmt(px), y1: fmt(base), x2: fmt(px), y2: fmt(base + 4),
        stroke: "#888",
      }));
      pieces.push(text(px, base + 16, tickLabel(v),
                       { "text-anchor": "middle" }));
    }
    if (opts.xLabel) {
      pieces.push(text(f.left + f.width / 2, f.top + f.height + 30,
                       opts.xLabel, { "text-anchor": "middle" }));
    }
  }
  if (opts.yLabel) {
    pieces.push(text(f.left + 6, f.top + 14, opts.yLabel));
  }
  return pieces.join("");
}

export function svgDocument(
  width: number, height: number, body: string): string {
  return `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" ` +
    `height="${height}" viewBox="0 0 ${width} ${height}">` +
    `<rect width="${width}" height="${height}" fill="white"/>` +
    body + "</svg>";
}
