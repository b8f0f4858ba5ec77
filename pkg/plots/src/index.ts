export { render, KINDS, FigureKind, RenderOptions } from "./figures";
export { readCsv, numericColumn } from "./csv";
export { readFieldDump } from "./fielddump";
export { main as cliMain } from "./cli";
