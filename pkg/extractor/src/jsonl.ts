/**
 * Line-oriented JSON input and output.
 *
 * Output layout matches the embedding-dataset format consumed by the
 * companion toolkit: an optional first line `{"meta": {...}}` carrying
 * provenance, then one `{"id", "label", "vector", ...}` object per line.
 * Output files are written via a sibling temp file plus rename, so a
 * crash never leaves a half-written dataset behind.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { DatasetRecord, RowError } from "./extract";

export interface ParsedInput {
  rows: { row: number; value: unknown }[];
  /** Lines that were not valid JSON; same row numbering as `rows`. */
  parseErrors: RowError[];
}

/** Raised for unreadable input or unwritable output (fatal). */
export class FileError extends Error {}

/**
 * Read the input file and JSON-parse each non-blank line. Rows are
 * numbered 1..N over the non-blank lines, and a line that fails to parse
 * still consumes its row number so later reports stay aligned.
 */
export function readInputRows(inputPath: string): ParsedInput {
  let raw: string;
  try {
    raw = fs.readFileSync(inputPath, "utf-8");
  } catch (error) {
    throw new FileError(
      `cannot read input ${JSON.stringify(inputPath)}: ${message(error)}`,
    );
  }
  const parsed: ParsedInput = { rows: [], parseErrors: [] };
  let rowNumber = 0;
  for (const line of raw.split(/\r?\n/)) {
    if (line.trim() === "") {
      continue;
    }
    rowNumber += 1;
    try {
      parsed.rows.push({ row: rowNumber, value: JSON.parse(line) });
    } catch (error) {
      parsed.parseErrors.push({
        row: rowNumber,
        error: `invalid JSON: ${message(error)}`,
      });
    }
  }
  return parsed;
}

function message(error: unknown): string {
  return error instanceof Error ? error.message : String(error);
}

function atomicWrite(outputPath: string, payload: string): void {
  const directory = path.dirname(path.resolve(outputPath));
  const temp = path.join(
    directory,
    `.tmp-${process.pid}-${path.basename(outputPath)}`,
  );
  try {
    fs.writeFileSync(temp, payload, "utf-8");
    fs.renameSync(temp, outputPath);
  } catch (error) {
    try {
      fs.rmSync(temp, { force: true });
    } catch {
      // best effort; the original failure is the one worth reporting
    }
    throw new FileError(
      `cannot write ${JSON.stringify(outputPath)}: ${message(error)}`,
    );
  }
}

/** Write the dataset: meta header first, then one record per line. */
export function writeDataset(
  outputPath: string,
  meta: Record<string, unknown>,
  records: readonly DatasetRecord[],
): void {
  const lines = [JSON.stringify({ meta })];
  for (const record of records) {
    lines.push(JSON.stringify(record));
  }
  atomicWrite(outputPath, lines.join("\n") + "\n");
}

/** Write row-level errors as one JSON object per line. */
export function writeErrorReport(
  outputPath: string,
  errors: readonly RowError[],
): void {
  const lines = errors.map((entry) => JSON.stringify(entry));
  atomicWrite(outputPath, lines.join("\n") + (lines.length > 0 ? "\n" : ""));
}
