import { describe, expect, it } from "vitest";
import { fileURLToPath } from "node:url";
import { join } from "node:path";
import { MissingColumnError, MissingFileError } from "../src/errors.js";
import { readTable } from "../src/table.js";

const FIXTURES = fileURLToPath(new URL("./fixtures", import.meta.url));

describe("readTable", () => {
  it("parses a statistics artifact with provenance comment and CRLF rows", () => {
    const table = readTable(join(FIXTURES, "two_photon_master", "bundle_stats.csv"));
    expect(table.header[0]).toBe("t");
    expect(table.header).toContain("g1_2");
    expect(table.header).toContain("bundle2_intensity");
    expect(table.length).toBe(57);
    const t = table.column("t");
    expect(t[0]).toBe(0);
    expect(t[t.length - 1]).toBeCloseTo(84000, 6);
  });

  it("maps masked (empty) fields to NaN", () => {
    const table = readTable(join(FIXTURES, "two_photon_master", "bundle_stats.csv"));
    const g = table.column("g1_2");
    expect(Number.isNaN(g[0])).toBe(true);
    expect(Number.isNaN(g[1])).toBe(true);
    expect(g.some((v) => Number.isFinite(v))).toBe(true);
  });

  it("throws MissingColumnError for an unknown column", () => {
    const table = readTable(join(FIXTURES, "two_photon_master", "populations.csv"));
    expect(() => table.column("P_b99")).toThrow(MissingColumnError);
    expect(() => table.column("P_b99")).toThrow(/P_b99/);
  });

  it("throws MissingColumnError for any column of an empty file", () => {
    const table = readTable(join(FIXTURES, "broken_empty_csv", "populations.csv"));
    expect(table.length).toBe(0);
    expect(() => table.column("t")).toThrow(MissingColumnError);
  });

  it("throws MissingFileError when the file does not exist", () => {
    expect(() => readTable(join(FIXTURES, "no_such_run", "populations.csv"))).toThrow(
      MissingFileError,
    );
  });
});
