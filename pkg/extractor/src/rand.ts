/**
 * Deterministic string hashing and pseudo-random streams.
 *
 * Both routines use only 32-bit integer arithmetic (`Math.imul`, shifts),
 * so a given input string yields the same stream on every platform, Node
 * version, and run. That property is what makes the local encoder's
 * output reproducible byte-for-byte.
 */

/** cyrb128: mix a string into four 32-bit words usable as a PRNG seed. */
export function cyrb128(input: string): [number, number, number, number] {
  let h1 = 1779033703;
  let h2 = 3144134277;
  let h3 = 1013904242;
  let h4 = 2773480762;
  for (let i = 0; i < input.length; i++) {
    const k = input.charCodeAt(i);
    h1 = h2 ^ Math.imul(h1 ^ k, 597399067);
    h2 = h3 ^ Math.imul(h2 ^ k, 2869860233);
    h3 = h4 ^ Math.imul(h3 ^ k, 951274213);
    h4 = h1 ^ Math.imul(h4 ^ k, 2716044179);
  }
  h1 = Math.imul(h3 ^ (h1 >>> 18), 597399067);
  h2 = Math.imul(h4 ^ (h2 >>> 22), 2869860233);
  h3 = Math.imul(h1 ^ (h3 >>> 17), 951274213);
  h4 = Math.imul(h2 ^ (h4 >>> 19), 2716044179);
  return [
    (h1 ^ h2 ^ h3 ^ h4) >>> 0,
    (h2 ^ h1) >>> 0,
    (h3 ^ h1) >>> 0,
    (h4 ^ h1) >>> 0,
  ];
}

/** sfc32: small fast counter PRNG; returns numbers uniform in [0, 1). */
export function sfc32(
  a: number,
  b: number,
  c: number,
  d: number,
): () => number {
  return () => {
    a >>>= 0;
    b >>>= 0;
    c >>>= 0;
    d >>>= 0;
    let t = (a + b) | 0;
    a = b ^ (b >>> 9);
    b = (c + (c << 3)) | 0;
    c = (c << 21) | (c >>> 11);
    d = (d + 1) | 0;
    t = (t + d) | 0;
    c = (c + t) | 0;
    return (t >>> 0) / 4294967296;
  };
}

/** A PRNG whose stream is a pure function of the key string. */
export function streamFor(key: string): () => number {
  const [a, b, c, d] = cyrb128(key);
  return sfc32(a, b, c, d);
}
