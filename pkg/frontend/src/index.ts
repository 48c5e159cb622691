export { parseCurve, label, realizations, CsvError, COLUMNS } from "./csv.js";
export type { Curve } from "./csv.js";
export { loadBundle, loadCurve, checkPanelGrid, GridMismatchError } from "./figure.js";
export type { FigureBundle, Panel } from "./figure.js";
export { renderFigure } from "./svg.js";
export type { RenderOptions } from "./svg.js";
