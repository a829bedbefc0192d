export { MissingColumnError, MissingFileError, RecipeError } from "./errors.js";
export { Table, readTable } from "./table.js";
export { extent, formatNumber, linearScale, logScale, niceTicks } from "./scales.js";
export type { Scale } from "./scales.js";
export {
  BUNDLED_RECIPES,
  recipeById,
  recipesFor,
} from "./recipes.js";
export type { AxisSpec, FigureRecipe, PanelSpec, SeriesSpec } from "./recipes.js";
export { renderFigure, renderRun } from "./render.js";
export type { RenderedFigure } from "./render.js";
