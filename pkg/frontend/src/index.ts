export { parseSweepCsv, SweepSchemaError, SWEEP_COLUMNS } from "./csv.js";
export type { SweepRow } from "./csv.js";
export { logLogFit } from "./fit.js";
export type { FitResult } from "./fit.js";
export { renderPanels, formatSlope } from "./render.js";
export type { PanelSpec, RenderedPanel, RenderOptions } from "./render.js";
