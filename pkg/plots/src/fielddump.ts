import { readFileSync } from "fs";

/** Parsed line-oriented spinor field dump ("diracpilot-field 1"). */
export interface FieldDump {
  zMin: number;
  zMax: number;
  tMin: number;
  tMax: number;
  nZ: number;
  nT: number;
  c: number;
  /** nT x nZ signed density |c1|^2 + |c2|^2 - |c3|^2 - |c4|^2, t-major. */
  barDensity: Float64Array;
}

export function readFieldDump(path: string): FieldDump {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch {
    throw new Error(`cannot read input file: ${path}`);
  }
  const lines = text.split("\n");
  if (lines[0].trim() !== "diracpilot-field 1") {
    throw new Error(`not a field dump: ${path}`);
  }
  const g = lines[1].trim().split(/\s+/).map(Number);
  const k = lines[2].trim().split(/\s+/).map(Number);
  const [zMin, zMax, tMin, tMax] = g;
  const nZ = g[4] | 0;
  const nT = g[5] | 0;
  const bar = new Float64Array(nT * nZ);
  for (let i = 0; i < nT * nZ; i++) {
    const parts = lines[4 + i].trim().split(/\s+/).map(Number);
    if (parts.length !== 8 || parts.some((x) => Number.isNaN(x))) {
      throw new Error(`malformed field record at line ${5 + i} in ${path}`);
    }
    const [r1, i1, r2, i2, r3, i3, r4, i4] = parts;
    bar[i] = r1 * r1 + i1 * i1 + r2 * r2 + i2 * i2 - r3 * r3 - i3 * i3 - r4 * r4 - i4 * i4;
  }
  return { zMin, zMax, tMin, tMax, nZ, nT, c: k[0], barDensity: bar };
}
