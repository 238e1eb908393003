import { readFileSync, existsSync } from "node:fs";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import {
  FormatError, TRAJECTORY_HEADER, parseTrajectory,
} from "../src/csv.js";

const FIXTURES = fileURLToPath(new URL("../fixtures/", import.meta.url));
const TRACK = join(FIXTURES, "track.csv");

function row(overrides: Record<number, string> = {}, t = "0.0"): string {
  const vals = Array(18).fill("0.5");
  vals[0] = t;
  vals[10] = "inf";
  for (const [k, v] of Object.entries(overrides)) {
    vals[Number(k)] = v;
  }
  return vals.join(",");
}

function doc(...rows: string[]): string {
  return [TRAJECTORY_HEADER, ...rows, ""].join("\n");
}

describe("trajectory parsing", () => {
  it("reads rows into column arrays", () => {
    const traj = parseTrajectory(
      doc(row({}, "0.0"), row({ 10: "2.5" }, "0.1")));
    expect(traj.t).toEqual([0.0, 0.1]);
    expect(traj.y[0]).toHaveLength(4);
    expect(traj.funnelRadius[0]).toBe(Infinity);
    expect(traj.funnelRadius[1]).toBe(2.5);
    expect(traj.margin[1]).toBe(0.5);
  });

  it("names the missing column on a header mismatch", () => {
    const noMargin = TRAJECTORY_HEADER.replace(",margin", "");
    const text = [noMargin, row(), ""].join("\n");
    expect(() => parseTrajectory(text))
      .toThrow(/missing column\(s\) margin/);
  });

  it("rejects a reordered header", () => {
    const cols = TRAJECTORY_HEADER.split(",").reverse().join(",");
    expect(() => parseTrajectory([cols, row(), ""].join("\n")))
      .toThrow(/column order or extras/);
  });

  it("allows inf only in the radius column", () => {
    expect(() => parseTrajectory(doc(row({ 3: "inf" }))))
      .toThrow(/non-finite value in column y3/);
    expect(() => parseTrajectory(doc(row({ 17: "nan" }))))
      .toThrow(FormatError);
    expect(() => parseTrajectory(doc(row({ 6: "" }))))
      .toThrow(/column yref2/);
    expect(() => parseTrajectory(doc(row({ 1: " 1.0" }))))
      .toThrow(FormatError);
  });

  it("requires strictly increasing times with line numbers", () => {
    expect(() => parseTrajectory(doc(row({}, "0.2"), row({}, "0.2"))))
      .toThrow(/line 3: time 0.2 does not increase/);
  });

  it("rejects wrong column counts and empty documents", () => {
    expect(() => parseTrajectory(doc("1,2,3")))
      .toThrow(/expected 18 columns, got 3/);
    expect(() => parseTrajectory("")).toThrow(/empty/);
    expect(() => parseTrajectory(TRAJECTORY_HEADER + "\n"))
      .toThrow(/no samples/);
  });
});

describe.skipIf(!existsSync(TRACK))("recorded tracking run", () => {
  it("parses the full closed-loop artifact", () => {
    const traj = parseTrajectory(readFileSync(TRACK, "utf8"));
    expect(traj.t.length).toBe(4001);
    expect(traj.t[0]).toBe(0);
    expect(traj.t[traj.t.length - 1]).toBe(400);
    expect(traj.funnelRadius[0]).toBe(Infinity);
    expect(traj.margin[0]).toBe(1);
    expect(traj.eNorm.every(Number.isFinite)).toBe(true);
  });
});
