// Reader for the plain-text state snapshot: an "nx ny t" header line
// followed by one "v u" pair per node, row major with x fastest.

import { FormatError } from "./csv.js";

export interface Snapshot {
  nx: number;
  ny: number;
  t: number;
  v: number[];
  u: number[];
}

function finite(raw: string, line: number, what: string): number {
  const x = raw === "" ? NaN : Number(raw);
  if (!Number.isFinite(x)) {
    throw new FormatError(
      `line ${line}: expected a finite ${what}, got "${raw}"`);
  }
  return x;
}

export function parseSnapshot(text: string): Snapshot {
  const lines = text.split("\n");
  if (lines.length > 0 && lines[lines.length - 1] === "") lines.pop();
  if (lines.length === 0) throw new FormatError("empty snapshot file");
  const head = lines[0].split(" ");
  if (head.length !== 3) {
    throw new FormatError('snapshot header must be "nx ny t"');
  }
  const nx = finite(head[0], 1, "nx");
  const ny = finite(head[1], 1, "ny");
  if (!Number.isInteger(nx) || !Number.isInteger(ny) || nx < 1 || ny < 1) {
    throw new FormatError("nx and ny must be positive integers");
  }
  const t = finite(head[2], 1, "time");
  const nodes = (nx + 1) * (ny + 1);
  if (lines.length - 1 !== nodes) {
    throw new FormatError(
      `expected ${nodes} node lines for a ${nx}x${ny} grid, got ` +
      `${lines.length - 1}`);
  }
  const v: number[] = [];
  const u: number[] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(" ");
    if (parts.length !== 2) {
      throw new FormatError(`line ${i + 1}: expected "v u"`);
    }
    v.push(finite(parts[0], i + 1, "potential"));
    u.push(finite(parts[1], i + 1, "recovery"));
  }
  return { nx, ny, t, v, u };
}
