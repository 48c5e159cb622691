/**
 * Reader for the simulator's results CSV format:
 *
 *   # key: value            (metadata lines)
 *   t,mean,stderr,min,max   (fixed header)
 *   0.0,1.0,0.0,1.0,1.0     (repr-exact floats)
 */

export const COLUMNS = ["t", "mean", "stderr", "min", "max"] as const;

export interface Curve {
  /** source path, kept for error messages */
  file: string;
  meta: Record<string, string>;
  t: number[];
  mean: number[];
  stderr: number[];
  min: number[];
  max: number[];
}

export class CsvError extends Error {
  constructor(file: string, line: number | null, detail: string) {
    super(line === null ? `${file}: ${detail}` : `${file}:${line}: ${detail}`);
    this.name = "CsvError";
  }
}

export function parseCurve(file: string, text: string): Curve {
  const meta: Record<string, string> = {};
  const cols: number[][] = COLUMNS.map(() => []);
  let sawHeader = false;
  const lines = text.split("\n");
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (line === "") continue;
    if (line.startsWith("#")) {
      const body = line.slice(1);
      const sep = body.indexOf(":");
      if (sep < 0) throw new CsvError(file, i + 1, "metadata line without ':'");
      meta[body.slice(0, sep).trim()] = body.slice(sep + 1).trim();
      continue;
    }
    if (line === COLUMNS.join(",")) {
      sawHeader = true;
      continue;
    }
    if (!sawHeader) {
      throw new CsvError(file, i + 1, `expected header '${COLUMNS.join(",")}'`);
    }
    const parts = line.split(",");
    if (parts.length !== COLUMNS.length) {
      throw new CsvError(file, i + 1, `expected ${COLUMNS.length} columns, got ${parts.length}`);
    }
    parts.forEach((p, j) => {
      const v = Number(p);
      if (!Number.isFinite(v)) throw new CsvError(file, i + 1, `not a number: '${p}'`);
      cols[j].push(v);
    });
  }
  if (!sawHeader) throw new CsvError(file, null, "missing column header");
  if (cols[0].length === 0) throw new CsvError(file, null, "no data rows");
  if (!meta.protocol) throw new CsvError(file, null, "missing 'protocol' metadata");
  return {
    file,
    meta,
    t: cols[0],
    mean: cols[1],
    stderr: cols[2],
    min: cols[3],
    max: cols[4],
  };
}

/** Legend label: protocol name, qualified by delta_t when a panel holds
 *  several curves of the same protocol. */
export function label(curve: Curve, siblings: Curve[]): string {
  const p = curve.meta.protocol;
  const clash = siblings.some((c) => c !== curve && c.meta.protocol === p);
  return clash ? `${p} (dt=${curve.meta.delta_t})` : p;
}

export function realizations(curve: Curve): number {
  return Number(curve.meta.R ?? "1");
}
