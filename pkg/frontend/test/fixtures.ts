import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

export function makeCsv(protocol: string, t: number[], opts: { R?: number; dt?: number } = {}): string {
  const rows = t
    .map((tv, i) => {
      const mean = Math.exp(-0.1 * tv);
      const se = (opts.R ?? 1) > 1 ? 0.01 : 0.0;
      return `${tv},${mean},${se},${mean - 2 * se},${Math.min(1, mean + 2 * se)}`;
    })
    .join("\n");
  return [
    `# protocol: ${protocol}`,
    `# R: ${opts.R ?? 1}`,
    `# delta_t: ${opts.dt ?? 0.1}`,
    "t,mean,stderr,min,max",
    rows,
    "",
  ].join("\n");
}

export const GRID = Array.from({ length: 11 }, (_, i) => i * 0.4);

/** Write a complete synthetic bundle for the given figure into a temp dir. */
export function makeBundle(figure: 1 | 2, override: Record<string, string> = {}): string {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), "plotdd-"));
  const files: Record<string, string> =
    figure === 1
      ? {
          "fig1_left_FREE.csv": makeCsv("FREE", GRID),
          "fig1_left_PDD_Tc0.08.csv": makeCsv("PDD", GRID, { dt: 0.005 }),
          "fig1_left_PDD_Tc0.12.csv": makeCsv("PDD", GRID, { dt: 0.0075 }),
          "fig1_left_NRD.csv": makeCsv("NRD", GRID, { R: 50 }),
          "fig1_right_PDD.csv": makeCsv("PDD", GRID),
          "fig1_right_NRD.csv": makeCsv("NRD", GRID, { R: 100 }),
        }
      : {
          "fig2_left_FREE.csv": makeCsv("FREE", GRID),
          "fig2_left_PDD.csv": makeCsv("PDD", GRID),
          "fig2_left_SDD.csv": makeCsv("SDD", GRID),
          "fig2_left_CDD.csv": makeCsv("CDD", GRID),
          "fig2_left_NRD.csv": makeCsv("NRD", GRID, { R: 100 }),
          "fig2_left_pRPD.csv": makeCsv("pRPD", GRID, { R: 100 }),
          "fig2_left_SRPD.csv": makeCsv("SRPD", GRID, { R: 100 }),
          "fig2_right_CDD.csv": makeCsv("CDD", GRID, { dt: 0.05 }),
          "fig2_right_SRPD.csv": makeCsv("SRPD", GRID, { R: 100, dt: 0.05 }),
          "fig2_right_HYBRID.csv": makeCsv("HYBRID", GRID, { R: 100, dt: 0.05 }),
        };
  for (const [name, text] of Object.entries({ ...files, ...override })) {
    fs.writeFileSync(path.join(dir, name), text);
  }
  return dir;
}
