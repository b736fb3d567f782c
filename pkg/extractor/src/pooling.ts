/**
 * Pooling: collapse a sequence of token vectors into one row vector.
 *
 * - `cls`         whole-sequence summary from the encoder
 * - `mean`        normalized mean over all kept tokens
 * - `token-first` the vector of the first token the span touches
 * - `token-mean`  normalized mean over the tokens the span touches
 *
 * The two `token-*` modes require a character span; `cls` and `mean`
 * ignore spans when present.
 */

import { HashEncoder } from "./encoder";

export const POOLING_MODES = [
  "cls",
  "mean",
  "token-first",
  "token-mean",
] as const;

export type PoolingMode = (typeof POOLING_MODES)[number];

export function isPoolingMode(value: string): value is PoolingMode {
  return (POOLING_MODES as readonly string[]).includes(value);
}

function meanOf(vectors: readonly Float64Array[]): Float64Array {
  // the mean of one vector is that vector; copying it bit-for-bit keeps
  // token-mean and token-first identical on single-token spans instead
  // of differing in the last ulp through renormalization
  if (vectors.length === 1) {
    return Float64Array.from(vectors[0] as Float64Array);
  }
  const dimension = (vectors[0] as Float64Array).length;
  const acc = new Float64Array(dimension);
  for (const vector of vectors) {
    for (let i = 0; i < dimension; i++) {
      acc[i] = (acc[i] as number) + (vector[i] as number);
    }
  }
  let sumSquares = 0;
  for (let i = 0; i < dimension; i++) {
    acc[i] = (acc[i] as number) / vectors.length;
    sumSquares += (acc[i] as number) ** 2;
  }
  const norm = Math.sqrt(sumSquares);
  if (norm > 1e-12) {
    for (let i = 0; i < dimension; i++) {
      acc[i] = (acc[i] as number) / norm;
    }
  }
  return acc;
}

/**
 * Pool `tokenVectors` according to `mode`. `spanTokenIndices` must index
 * into `tokenVectors` and be non-empty for the `token-*` modes; callers
 * validate spans before getting here.
 */
export function pool(
  encoder: HashEncoder,
  tokenVectors: readonly Float64Array[],
  mode: PoolingMode,
  spanTokenIndices?: readonly number[],
): Float64Array {
  switch (mode) {
    case "cls":
      return encoder.summaryVector(tokenVectors);
    case "mean":
      return meanOf(tokenVectors);
    case "token-first": {
      const first = (spanTokenIndices as readonly number[])[0] as number;
      return Float64Array.from(tokenVectors[first] as Float64Array);
    }
    case "token-mean": {
      const picked = (spanTokenIndices as readonly number[]).map(
        (index) => tokenVectors[index] as Float64Array,
      );
      return meanOf(picked);
    }
  }
}
