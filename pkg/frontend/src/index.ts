export { parseCsv, readCsv, requireColumns, column, SchemaError } from "./csv.js";
export type { ParsedCsv } from "./csv.js";
export { render, EXPECTED_COLUMNS } from "./render.js";
export type { FigureKind, PlotJob, StyleOptions } from "./render.js";
