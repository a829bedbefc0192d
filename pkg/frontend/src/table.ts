/**
 * Column-oriented access to one CSV run artifact.
 *
 * The solver writes RFC-4180-style files: an optional leading `#` provenance
 * comment, a header row, then numeric rows where masked samples are empty
 * fields. Empty and non-numeric fields parse to NaN so the renderer can turn
 * them into gaps.
 */

import { readFileSync } from "node:fs";
import Papa from "papaparse";
import { MissingColumnError, MissingFileError } from "./errors.js";

export class Table {
  private readonly index = new Map<string, number>();

  constructor(
    readonly path: string,
    readonly header: readonly string[],
    private readonly rows: readonly (readonly string[])[],
  ) {
    header.forEach((name, i) => this.index.set(name, i));
  }

  get length(): number {
    return this.rows.length;
  }

  has(name: string): boolean {
    return this.index.has(name);
  }

  column(name: string): number[] {
    const i = this.index.get(name);
    if (i === undefined) {
      throw new MissingColumnError(name, this.path);
    }
    return this.rows.map((row) => {
      const cell = row[i];
      return cell === undefined || cell === "" ? NaN : Number(cell);
    });
  }
}

export function readTable(path: string): Table {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err) {
    if ((err as NodeJS.ErrnoException).code === "ENOENT") {
      throw new MissingFileError(path);
    }
    throw err;
  }
  // the writer mixes a \n-terminated comment with \r\n records, which would
  // defeat papaparse's newline sniffing and leave \r on the last field
  const parsed = Papa.parse<string[]>(text.replace(/\r\n/g, "\n"), {
    comments: "#",
    skipEmptyLines: true,
  });
  const [header, ...rows] = parsed.data;
  return new Table(path, header ?? [], rows);
}
