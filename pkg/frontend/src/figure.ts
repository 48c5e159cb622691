/**
 * Bundle layout of the two preset figures: which CSV files belong to
 * which panel, and the shared-grid invariant within a panel.
 */

import * as fs from "node:fs";
import * as path from "node:path";
import { Curve, CsvError, parseCurve } from "./csv.js";

export interface Panel {
  title: string;
  curves: Curve[];
}

export interface FigureBundle {
  figure: 1 | 2;
  panels: [Panel, Panel];
}

export class GridMismatchError extends Error {
  constructor(panel: string, a: Curve, b: Curve) {
    super(
      `grid mismatch in panel '${panel}': ${a.file} and ${b.file} ` +
        `sample different time grids (no silent interpolation)`,
    );
    this.name = "GridMismatchError";
  }
}

const LAYOUT: Record<1 | 2, { title: string; files: string[] }[]> = {
  1: [
    {
      title: "fidelity at cycle boundaries",
      files: [
        "fig1_left_FREE.csv",
        "fig1_left_PDD_Tc0.08.csv",
        "fig1_left_PDD_Tc0.12.csv",
        "fig1_left_NRD.csv",
      ],
    },
    {
      title: "fidelity within one cycle",
      files: ["fig1_right_PDD.csv", "fig1_right_NRD.csv"],
    },
  ],
  2: [
    {
      title: "collective group, Delta = 1",
      files: [
        "fig2_left_FREE.csv",
        "fig2_left_PDD.csv",
        "fig2_left_SDD.csv",
        "fig2_left_CDD.csv",
        "fig2_left_NRD.csv",
        "fig2_left_pRPD.csv",
        "fig2_left_SRPD.csv",
      ],
    },
    {
      title: "hybrid, Delta = 5",
      files: ["fig2_right_CDD.csv", "fig2_right_SRPD.csv", "fig2_right_HYBRID.csv"],
    },
  ],
};

// Curves with different dt ladders can land on the same nominal grid with
// last-ulp differences (e.g. 3 x 0.08 vs 2 x 0.12), so compare with a tight
// relative tolerance rather than bitwise.
function sameGrid(a: number[], b: number[]): boolean {
  return (
    a.length === b.length &&
    a.every((v, i) => Math.abs(v - b[i]) <= 1e-12 + 1e-9 * Math.abs(v))
  );
}

export function checkPanelGrid(title: string, curves: Curve[]): void {
  for (const c of curves.slice(1)) {
    if (!sameGrid(curves[0].t, c.t)) {
      throw new GridMismatchError(title, curves[0], c);
    }
  }
}

export function loadCurve(file: string): Curve {
  let text: string;
  try {
    text = fs.readFileSync(file, "utf-8");
  } catch {
    throw new CsvError(file, null, "cannot read file");
  }
  return parseCurve(file, text);
}

export function loadBundle(figure: 1 | 2, dir: string): FigureBundle {
  const panels = LAYOUT[figure].map(({ title, files }) => {
    const curves = files.map((f) => loadCurve(path.join(dir, f)));
    checkPanelGrid(title, curves);
    return { title, curves };
  });
  return { figure, panels: panels as [Panel, Panel] };
}
