/**
 * Input-contract failures raised while reading run artifacts.
 *
 * Both map to the validation exit code of the command line entry point;
 * anything else escaping the renderer is a bug, not a bad input.
 */

export class MissingFileError extends Error {
  constructor(readonly path: string) {
    super(`input file not found: ${path}`);
    this.name = "MissingFileError";
  }
}

export class MissingColumnError extends Error {
  constructor(readonly column: string, readonly path: string) {
    super(`column "${column}" not present in ${path}`);
    this.name = "MissingColumnError";
  }
}

/** Bad invocation or a run directory the bundled recipes do not cover. */
export class RecipeError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "RecipeError";
  }
}
