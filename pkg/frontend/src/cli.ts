#!/usr/bin/env node
/**
 * make-figures: regenerate the bundled figures from a run directory.
 *
 * Usage:
 *   make-figures <run-dir> [--out-dir <dir>] [--figure <id>]
 *   make-figures --list
 *
 * Reads only the CSV and summary artifacts a solver run left behind and
 * writes one SVG per matching recipe. Exit code 0 on success, 2 when the
 * inputs are missing or do not match any bundled recipe.
 */

import { mkdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import { parseArgs } from "node:util";
import { pathToFileURL } from "node:url";
import { MissingColumnError, MissingFileError, RecipeError } from "./errors.js";
import { BUNDLED_RECIPES } from "./recipes.js";
import { renderRun } from "./render.js";

const USAGE = "usage: make-figures <run-dir> [--out-dir <dir>] [--figure <id>] | --list";

export function main(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        "out-dir": { type: "string" },
        figure: { type: "string" },
        list: { type: "boolean", default: false },
      },
    });
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    console.error(USAGE);
    return 2;
  }

  if (parsed.values.list) {
    for (const recipe of BUNDLED_RECIPES) {
      console.log(`${recipe.id}  (kind: ${recipe.kind})`);
    }
    return 0;
  }

  const runDir = parsed.positionals[0];
  if (runDir === undefined || parsed.positionals.length > 1) {
    console.error(USAGE);
    return 2;
  }

  try {
    const figures = renderRun(runDir, parsed.values.figure);
    const outDir = parsed.values["out-dir"] ?? join(runDir, "figures");
    mkdirSync(outDir, { recursive: true });
    for (const fig of figures) {
      const path = join(outDir, `${fig.id}.svg`);
      writeFileSync(path, fig.svg);
      console.log(`wrote ${path}`);
    }
    return 0;
  } catch (err) {
    if (
      err instanceof MissingFileError ||
      err instanceof MissingColumnError ||
      err instanceof RecipeError
    ) {
      console.error(`error: ${err.message}`);
      return 2;
    }
    throw err;
  }
}

const invokedAs = process.argv[1] ? pathToFileURL(process.argv[1]).href : "";
if (import.meta.url === invokedAs) {
  process.exit(main(process.argv.slice(2)));
}
