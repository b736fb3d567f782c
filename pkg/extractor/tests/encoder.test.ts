import { describe, expect, it } from "vitest";

import {
  DEFAULT_ENCODER,
  EncoderError,
  HashEncoder,
  loadEncoder,
} from "../src/encoder";

function norm(values: Float64Array): number {
  let total = 0;
  for (const v of values) {
    total += v * v;
  }
  return Math.sqrt(total);
}

describe("loadEncoder", () => {
  it("builds the default encoder with hidden size 768", () => {
    const encoder = loadEncoder(DEFAULT_ENCODER);
    expect(encoder.name).toBe("local-hash-768");
    expect(encoder.dimension).toBe(768);
  });

  it("supports other hidden sizes in the local family", () => {
    expect(loadEncoder("local-hash-16").dimension).toBe(16);
    expect(loadEncoder("local-hash-1024").dimension).toBe(1024);
  });

  it("fails to load unknown encoder names", () => {
    expect(() => loadEncoder("bert-base-uncased")).toThrow(EncoderError);
    expect(() => loadEncoder("bert-base-uncased")).toThrow(
      /encoder load failure/,
    );
  });

  it("rejects hidden sizes outside the supported range", () => {
    expect(() => loadEncoder("local-hash-4")).toThrow(/hidden size/);
    expect(() => loadEncoder("local-hash-100000")).toThrow(/hidden size/);
  });
});

describe("HashEncoder", () => {
  const encoder = loadEncoder(DEFAULT_ENCODER);

  it("gives every token a unit vector of the right dimension", () => {
    const vector = encoder.tokenVector("hello");
    expect(vector.length).toBe(768);
    expect(norm(vector)).toBeCloseTo(1, 12);
    expect(Array.from(vector).every(Number.isFinite)).toBe(true);
  });

  it("is deterministic across encoder instances", () => {
    const other = new HashEncoder("local-hash-768", 768);
    expect(Array.from(other.tokenVector("hello"))).toEqual(
      Array.from(encoder.tokenVector("hello")),
    );
  });

  it("maps different tokens to different vectors", () => {
    const a = encoder.tokenVector("hello");
    const b = encoder.tokenVector("world");
    let dot = 0;
    for (let i = 0; i < a.length; i++) {
      dot += (a[i] as number) * (b[i] as number);
    }
    expect(Math.abs(dot)).toBeLessThan(0.5);
  });

  it("depends on the encoder name, so families do not collide", () => {
    const small = loadEncoder("local-hash-16");
    const alsoSmall = new HashEncoder("local-hash-16-variant", 16);
    expect(Array.from(small.tokenVector("x"))).not.toEqual(
      Array.from(alsoSmall.tokenVector("x")),
    );
  });

  it("summarizes a sequence into a unit vector distinct from the mean", () => {
    const vectors = ["a", "b", "c"].map((t) => encoder.tokenVector(t));
    const summary = encoder.summaryVector(vectors);
    expect(summary.length).toBe(768);
    expect(norm(summary)).toBeCloseTo(1, 12);
    const mean = new Float64Array(768);
    for (const v of vectors) {
      for (let i = 0; i < 768; i++) {
        mean[i] = (mean[i] as number) + (v[i] as number) / vectors.length;
      }
    }
    let diff = 0;
    for (let i = 0; i < 768; i++) {
      diff = Math.max(diff, Math.abs((summary[i] as number) - (mean[i] as number)));
    }
    expect(diff).toBeGreaterThan(1e-3);
  });

  it("refuses to summarize an empty sequence", () => {
    expect(() => encoder.summaryVector([])).toThrow(EncoderError);
  });
});
