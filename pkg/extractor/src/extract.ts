/**
 * Core extraction pipeline: validated input rows go in, dataset records
 * (id, label, vector) come out, alongside row-level errors and
 * truncation warnings.
 *
 * Failure policy: anything wrong with a single row (bad shape, bad span,
 * empty text) is reported for that row and the row is skipped; the rest
 * of the file still encodes. Only a missing encoder or unreadable input
 * is fatal, and that is decided by the caller.
 */

import { HashEncoder } from "./encoder";
import { pool, PoolingMode } from "./pooling";
import { validateRow } from "./rows";
import { Token, tokenize, tokensInSpan } from "./tokenize";

export interface ExtractOptions {
  encoder: HashEncoder;
  pooling: PoolingMode;
  /** Rows are encoded in slices of this many at a time. */
  batchSize: number;
  /** Keep at most this many tokens per row (the head; the tail is cut). */
  maxLength: number;
}

export interface DatasetRecord {
  id: string;
  label: string;
  vector: number[];
  text: string;
  span?: [number, number];
}

export interface RowError {
  /** 1-based position among the non-blank input rows. */
  row: number;
  id?: string;
  error: string;
}

export interface ExtractResult {
  records: DatasetRecord[];
  errors: RowError[];
  warnings: string[];
}

interface PendingRow {
  /** 1-based position among the non-blank input rows. */
  row: number;
  value: unknown;
}

function spanIndicesOrError(
  tokens: Token[],
  keptCount: number,
  span: [number, number] | undefined,
  textLength: number,
  maxLength: number,
  mode: PoolingMode,
): { indices: number[] } | { error: string } {
  if (span === undefined) {
    return { error: `pooling mode ${mode} requires a span` };
  }
  const [start, end] = span;
  if (start < 0 || end > textLength || start >= end) {
    return {
      error:
        `span [${start}, ${end}) falls outside the text ` +
        `(length ${textLength})`,
    };
  }
  const indices = tokensInSpan(tokens, start, end);
  if (indices.length === 0) {
    return { error: `span [${start}, ${end}) covers no tokens` };
  }
  if ((indices[indices.length - 1] as number) >= keptCount) {
    return {
      error:
        `span [${start}, ${end}) lies beyond the first ${maxLength} ` +
        `tokens kept by truncation`,
    };
  }
  return { indices };
}

function encodeRow(
  pending: PendingRow,
  options: ExtractOptions,
  usedIds: Set<string>,
  result: ExtractResult,
): void {
  const validated = validateRow(pending.value);
  if ("error" in validated) {
    result.errors.push({ row: pending.row, error: validated.error });
    return;
  }
  const row = validated.row;
  const id = row.id ?? `r${String(pending.row).padStart(6, "0")}`;
  const fail = (error: string) =>
    result.errors.push({ row: pending.row, id, error });

  if (usedIds.has(id)) {
    fail(`duplicate id ${JSON.stringify(id)}`);
    return;
  }

  const tokens = tokenize(row.text);
  if (tokens.length === 0) {
    fail("text contains no tokens");
    return;
  }
  const kept = tokens.slice(0, options.maxLength);
  if (tokens.length > kept.length) {
    result.warnings.push(
      `row ${pending.row} (id=${id}): truncated from ${tokens.length} to ` +
        `${kept.length} tokens (kept the head)`,
    );
  }

  let spanIndices: number[] | undefined;
  if (options.pooling === "token-first" || options.pooling === "token-mean") {
    const picked = spanIndicesOrError(
      tokens,
      kept.length,
      row.span,
      row.text.length,
      options.maxLength,
      options.pooling,
    );
    if ("error" in picked) {
      fail(picked.error);
      return;
    }
    spanIndices = picked.indices;
  }

  const tokenVectors = kept.map((token) =>
    options.encoder.tokenVector(token.text),
  );
  const pooled = pool(options.encoder, tokenVectors, options.pooling, spanIndices);

  usedIds.add(id);
  const record: DatasetRecord = {
    id,
    label: row.label,
    vector: Array.from(pooled),
    text: row.text,
  };
  if (row.span !== undefined) {
    record.span = row.span;
  }
  result.records.push(record);
}

/**
 * Encode every row. `rows` carries the original 1-based row numbers, so
 * error reports point at the right lines even when earlier rows failed
 * to parse as JSON.
 */
export function extractRows(
  rows: PendingRow[],
  options: ExtractOptions,
): ExtractResult {
  if (!Number.isInteger(options.batchSize) || options.batchSize < 1) {
    throw new RangeError("batch size must be a positive integer");
  }
  if (!Number.isInteger(options.maxLength) || options.maxLength < 1) {
    throw new RangeError("max length must be a positive integer");
  }
  const result: ExtractResult = { records: [], errors: [], warnings: [] };
  const usedIds = new Set<string>();
  for (let start = 0; start < rows.length; start += options.batchSize) {
    const batch = rows.slice(start, start + options.batchSize);
    for (const pending of batch) {
      encodeRow(pending, options, usedIds, result);
    }
  }
  return result;
}
