// The three stock figures. All of them are pure functions from parsed
// file contents to an SVG string; nothing here touches the filesystem.

import { Trajectory } from "./csv.js";
import { Snapshot } from "./snapshot.js";
import {
  Frame, axes, clamp, fmt, frame, polygon, polyline, svgDocument, tag,
  text,
} from "./svg.js";

const WIDTH = 640;
const MARGIN = { left: 52, right: 14, top: 16, bottom: 40 };

function xDomain(traj: Trajectory): [number, number] {
  const t0 = traj.t[0];
  const t1 = traj.t[traj.t.length - 1];
  return t1 > t0 ? [t0, t1] : [t0, t0 + 1];
}

/**
 * Error norm against the funnel boundary 1/phi. The region above the
 * boundary is shaded; while phi is still zero the boundary is infinite,
 * so the shading is clipped away entirely at the top of the axes.
 */
export function renderFunnel(traj: Trajectory): string {
  const height = 400;
  const maxE = Math.max(...traj.eNorm);
  const finiteR = traj.funnelRadius.filter((r) => Number.isFinite(r));
  let yTop = Math.max(1.3 * maxE, 1e-3);
  if (finiteR.length > 0) {
    yTop = Math.max(yTop, 1.25 * Math.min(...finiteR));
  }
  const xd = xDomain(traj);
  const yd: [number, number] = [0, yTop];
  const f = frame(MARGIN.left, MARGIN.top,
                  WIDTH - MARGIN.left - MARGIN.right,
                  height - MARGIN.top - MARGIN.bottom, xd, yd);

  const boundary: Array<[number, number]> = traj.t.map((t, i) => [
    f.x(t), f.y(clamp(traj.funnelRadius[i], 0, yTop)),
  ]);
  const band = polygon(
    [...boundary,
     [f.left + f.width, f.top], [f.left, f.top]],
    { fill: "#cdd3de", "fill-opacity": 0.8, stroke: "none" });
  const edge = polyline(boundary, {
    stroke: "#5a6475", "stroke-width": 1.4, "stroke-dasharray": "6 3",
  });
  const error = polyline(
    traj.t.map((t, i) => [f.x(t), f.y(clamp(traj.eNorm[i], 0, yTop))]),
    { stroke: "#1f77b4", "stroke-width": 1.6 });

  const legend =
    text(f.left + f.width - 150, f.top + 16, "||e(t)||",
         { fill: "#1f77b4" }) +
    text(f.left + f.width - 150, f.top + 32, "1/phi(t) boundary",
         { fill: "#5a6475" });
  const body = band + edge + error
    + axes(f, xd, yd, { xLabel: "t", yLabel: "error norm" }) + legend;
  return svgDocument(WIDTH, height, body);
}

const PORTS = ["y1", "y2", "y3", "y4"];

/** Four stacked panels, measured output against its reference. */
export function renderTracking(traj: Trajectory): string {
  const panelH = 110;
  const gap = 10;
  const height = MARGIN.top + 4 * panelH + 3 * gap + MARGIN.bottom;
  const xd = xDomain(traj);
  const pieces: string[] = [];
  for (let port = 0; port < 4; port++) {
    const ys = traj.y.map((row) => row[port]);
    const refs = traj.yRef.map((row) => row[port]);
    let lo = Math.min(...ys, ...refs);
    let hi = Math.max(...ys, ...refs);
    if (!(hi > lo)) {
      lo -= 1;
      hi += 1;
    }
    const pad = 0.06 * (hi - lo);
    const yd: [number, number] = [lo - pad, hi + pad];
    const top = MARGIN.top + port * (panelH + gap);
    const f = frame(MARGIN.left, top,
                    WIDTH - MARGIN.left - MARGIN.right, panelH, xd, yd);
    pieces.push(polyline(
      traj.t.map((t, i) => [f.x(t), f.y(refs[i])]),
      { stroke: "#d62728", "stroke-width": 1.2,
        "stroke-dasharray": "5 3" }));
    pieces.push(polyline(
      traj.t.map((t, i) => [f.x(t), f.y(ys[i])]),
      { stroke: "#1f77b4", "stroke-width": 1.4 }));
    pieces.push(axes(f, xd, yd, {
      yLabel: PORTS[port], xLabel: "t", xTicks: port === 3,
    }));
  }
  pieces.push(text(MARGIN.left + 8, 12,
                   "output (solid) vs reference (dashed)"));
  return svgDocument(WIDTH, height, pieces.join(""));
}

function heatColor(s: number): string {
  // blue -> white -> red, s in [0, 1]
  const mix = (a: number, b: number, w: number) =>
    Math.round(a + (b - a) * w);
  let r: number, g: number, b: number;
  if (s < 0.5) {
    const w = s * 2;
    r = mix(33, 247, w);
    g = mix(75, 247, w);
    b = mix(160, 247, w);
  } else {
    const w = s * 2 - 1;
    r = mix(247, 178, w);
    g = mix(247, 34, w);
    b = mix(247, 34, w);
  }
  return `rgb(${r},${g},${b})`;
}

/** Heatmap of the potential field of one saved state. */
export function renderSnapshot(snap: Snapshot): string {
  const cols = snap.nx + 1;
  const rows = snap.ny + 1;
  const plot = WIDTH - MARGIN.left - MARGIN.right;
  const cell = plot / cols;
  const height = Math.ceil(MARGIN.top + cell * rows + 36);
  let vMin = Infinity;
  let vMax = -Infinity;
  for (const v of snap.v) {
    vMin = Math.min(vMin, v);
    vMax = Math.max(vMax, v);
  }
  const span = vMax - vMin;
  const cells: string[] = [];
  for (let iy = 0; iy < rows; iy++) {
    for (let ix = 0; ix < cols; ix++) {
      const v = snap.v[iy * cols + ix];
      const s = span === 0 ? 0.5 : (v - vMin) / span;
      cells.push(tag("rect", {
        x: fmt(MARGIN.left + ix * cell),
        y: fmt(MARGIN.top + (rows - 1 - iy) * cell),
        width: fmt(cell + 0.5), height: fmt(cell + 0.5),
        fill: heatColor(s),
      }));
    }
  }
  const caption = `v at t = ${snap.t}, range [${fmt(vMin)}, ` +
    `${fmt(vMax)}]`;
  const body = cells.join("")
    + tag("rect", {
      x: fmt(MARGIN.left), y: fmt(MARGIN.top), width: fmt(cell * cols),
      height: fmt(cell * rows), fill: "none", stroke: "#888",
    })
    + text(MARGIN.left, MARGIN.top + cell * rows + 20, caption);
  return svgDocument(WIDTH, height, body);
}
