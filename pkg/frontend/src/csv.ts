// Reader for the trajectory CSV contract. The header is fixed, every
// row carries 18 columns, times are strictly increasing, and "inf" is
// legal only in the funnel radius column.

export const TRAJECTORY_HEADER =
  "t,y1,y2,y3,y4,yref1,yref2,yref3,yref4,e_norm,funnel_radius," +
  "ise1,ise2,ise3,ise4,v_l2,u_l2,margin";

export const COLUMNS = TRAJECTORY_HEADER.split(",");
const RADIUS_COLUMN = COLUMNS.indexOf("funnel_radius");

export class FormatError extends Error {}

export interface Trajectory {
  t: number[];
  /** boundary outputs, one 4-vector per sample */
  y: number[][];
  yRef: number[][];
  eNorm: number[];
  funnelRadius: number[];
  iSe: number[][];
  vL2: number[];
  uL2: number[];
  margin: number[];
}

function parseValue(raw: string, line: number, col: number): number {
  if (raw === "inf") {
    if (col !== RADIUS_COLUMN) {
      throw new FormatError(
        `line ${line}: non-finite value in column ${COLUMNS[col]}`);
    }
    return Infinity;
  }
  const x = raw === "" || raw !== raw.trim() ? NaN : Number(raw);
  if (!Number.isFinite(x)) {
    throw new FormatError(
      `line ${line}: expected a finite number in column ` +
      `${COLUMNS[col]}, got "${raw}"`);
  }
  return x;
}

export function parseTrajectory(text: string): Trajectory {
  const lines = text.split("\n");
  if (lines.length > 0 && lines[lines.length - 1] === "") lines.pop();
  if (lines.length === 0) throw new FormatError("empty trajectory file");
  if (lines[0] !== TRAJECTORY_HEADER) {
    const got = lines[0].split(",");
    const missing = COLUMNS.filter((c) => !got.includes(c));
    if (missing.length > 0) {
      throw new FormatError(
        `header mismatch: missing column(s) ${missing.join(", ")}`);
    }
    throw new FormatError(
      "header mismatch: column order or extras differ from the contract");
  }
  if (lines.length < 2) throw new FormatError("no samples");

  const out: Trajectory = {
    t: [], y: [], yRef: [], eNorm: [], funnelRadius: [], iSe: [],
    vL2: [], uL2: [], margin: [],
  };
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== COLUMNS.length) {
      throw new FormatError(
        `line ${i + 1}: expected ${COLUMNS.length} columns, got ` +
        `${parts.length}`);
    }
    const row = parts.map((raw, col) => parseValue(raw, i + 1, col));
    const t = row[0];
    const last = out.t.length > 0 ? out.t[out.t.length - 1] : -Infinity;
    if (!(t > last)) {
      throw new FormatError(
        `line ${i + 1}: time ${t} does not increase past ${last}`);
    }
    out.t.push(t);
    out.y.push(row.slice(1, 5));
    out.yRef.push(row.slice(5, 9));
    out.eNorm.push(row[9]);
    out.funnelRadius.push(row[10]);
    out.iSe.push(row.slice(11, 15));
    out.vL2.push(row[15]);
    out.uL2.push(row[16]);
    out.margin.push(row[17]);
  }
  return out;
}
