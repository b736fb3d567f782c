#!/usr/bin/env node
/**
 * Command-line front end.
 *
 * Reads a labeled-text file (one JSON object per line), encodes every
 * row with the selected encoder and pooling mode, and writes the
 * embedding dataset plus optional row-level error report.
 *
 * Exit codes: 0 success, 1 fatal (encoder load failure, unreadable
 * input, unwritable output, or zero records produced), 2 usage.
 */

import yargs from "yargs";

import { DEFAULT_ENCODER, EncoderError, loadEncoder } from "./encoder";
import { extractRows, RowError } from "./extract";
import {
  FileError,
  readInputRows,
  writeDataset,
  writeErrorReport,
} from "./jsonl";
import { isPoolingMode, POOLING_MODES, PoolingMode } from "./pooling";

/** Anything the user can fix by changing flags. */
class UsageError extends Error {}

export interface Sink {
  write(chunk: string): unknown;
}

interface ParsedArgs {
  input: string;
  output: string;
  encoder: string;
  pooling: PoolingMode;
  batchSize: number;
  maxLength: number;
  errorsPath?: string;
  helpRequested: boolean;
}

function parseArgs(argv: string[]): ParsedArgs {
  const parsed = yargs(argv)
    .scriptName("embed-extract")
    .usage(
      "$0 --input rows.jsonl --output data.jsonl [options]\n\n" +
        "Encode labeled text into an embedding dataset. Each input line " +
        "is a JSON object {text, label, span?, id?}; spans are half-open " +
        "character offsets used by the token-* pooling modes.",
    )
    .option("input", {
      alias: "i",
      type: "string",
      demandOption: true,
      describe: "labeled-text file, one JSON object per line",
    })
    .option("output", {
      alias: "o",
      type: "string",
      demandOption: true,
      describe: "embedding dataset to write (line-oriented JSON)",
    })
    .option("encoder", {
      type: "string",
      default: DEFAULT_ENCODER,
      describe: "encoder name (local-hash-<dim> family)",
    })
    .option("pooling", {
      type: "string",
      default: "mean",
      choices: [...POOLING_MODES],
      describe: "how token vectors collapse into one row vector",
    })
    .option("batch-size", {
      type: "number",
      default: 32,
      describe: "rows encoded per internal batch",
    })
    .option("max-length", {
      type: "number",
      default: 128,
      describe: "keep at most this many tokens per row (head truncation)",
    })
    .option("errors", {
      type: "string",
      describe: "also write row-level errors here, one JSON object per line",
    })
    .strict()
    .help()
    .version(false)
    .exitProcess(false)
    .fail((msg, error) => {
      throw new UsageError(msg ?? error?.message ?? "invalid arguments");
    })
    .parseSync();

  if (parsed.help === true) {
    return {
      input: "",
      output: "",
      encoder: DEFAULT_ENCODER,
      pooling: "mean",
      batchSize: 32,
      maxLength: 128,
      helpRequested: true,
    };
  }
  const batchSize = parsed["batch-size"];
  const maxLength = parsed["max-length"];
  if (!Number.isInteger(batchSize) || (batchSize as number) < 1) {
    throw new UsageError("--batch-size must be a positive integer");
  }
  if (!Number.isInteger(maxLength) || (maxLength as number) < 1) {
    throw new UsageError("--max-length must be a positive integer");
  }
  const pooling = parsed.pooling as string;
  if (!isPoolingMode(pooling)) {
    throw new UsageError(`unknown pooling mode ${JSON.stringify(pooling)}`);
  }
  return {
    input: parsed.input as string,
    output: parsed.output as string,
    encoder: parsed.encoder as string,
    pooling,
    batchSize: batchSize as number,
    maxLength: maxLength as number,
    errorsPath: parsed.errors as string | undefined,
    helpRequested: false,
  };
}

function reportRowIssues(
  errors: readonly RowError[],
  warnings: readonly string[],
  err: Sink,
): void {
  for (const warning of warnings) {
    err.write(`warning: ${warning}\n`);
  }
  for (const entry of errors) {
    const idPart = entry.id !== undefined ? ` (id=${entry.id})` : "";
    err.write(`error: row ${entry.row}${idPart}: ${entry.error}\n`);
  }
}

/** Run the tool; returns the process exit code instead of exiting, so
 * tests can call it in-process with injected output sinks. */
export function runCli(
  argv: string[],
  out: Sink = process.stdout,
  err: Sink = process.stderr,
): number {
  let args: ParsedArgs;
  try {
    args = parseArgs(argv);
  } catch (error) {
    if (error instanceof UsageError) {
      err.write(`usage error: ${error.message}\n`);
      err.write("run with --help for details\n");
      return 2;
    }
    throw error;
  }
  if (args.helpRequested) {
    return 0;
  }

  try {
    const encoder = loadEncoder(args.encoder);
    const parsed = readInputRows(args.input);
    const result = extractRows(parsed.rows, {
      encoder,
      pooling: args.pooling,
      batchSize: args.batchSize,
      maxLength: args.maxLength,
    });
    const errors = [...parsed.parseErrors, ...result.errors].sort(
      (a, b) => a.row - b.row,
    );
    reportRowIssues(errors, result.warnings, err);
    if (args.errorsPath !== undefined) {
      writeErrorReport(args.errorsPath, errors);
    }
    if (result.records.length === 0) {
      const reason =
        parsed.rows.length + parsed.parseErrors.length === 0
          ? "input contains no rows"
          : "every input row failed";
      err.write(`fatal: no records produced (${reason})\n`);
      return 1;
    }
    writeDataset(
      args.output,
      {
        encoder: encoder.name,
        pooling: args.pooling,
        dimension: encoder.dimension,
        max_length: args.maxLength,
      },
      result.records,
    );
    out.write(`encoder: ${encoder.name} (dimension ${encoder.dimension})\n`);
    out.write(`pooling: ${args.pooling}\n`);
    const noun = result.records.length === 1 ? "record" : "records";
    out.write(`wrote ${result.records.length} ${noun} to ${args.output}\n`);
    if (errors.length > 0) {
      const rows = errors.length === 1 ? "row" : "rows";
      out.write(`skipped ${errors.length} ${rows} with errors\n`);
    }
    return 0;
  } catch (error) {
    if (error instanceof EncoderError || error instanceof FileError) {
      err.write(`fatal: ${error.message}\n`);
      return 1;
    }
    throw error;
  }
}

if (require.main === module) {
  process.exit(runCli(process.argv.slice(2)));
}
