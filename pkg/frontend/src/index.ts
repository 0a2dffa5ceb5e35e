export {
  SchemaError, checkOverlay, column, parseTable, parseTrajectory, requireColumns,
} from "./schema.js";
export type { ChainStation, FileMeta, Table, TrajectoryDoc } from "./schema.js";
export { render, renderCoverage, renderMaxmin, renderTrajectory } from "./figures.js";
export type { FigureKind, FigureSpec } from "./figures.js";
export { esc, fmtNum, lineChart, niceTicks } from "./svg.js";
export type { ChartOpts, Series } from "./svg.js";
