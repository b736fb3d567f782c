/**
 * Whitespace tokenization that keeps character offsets, so spans given
 * as character ranges can be mapped back onto the tokens they touch.
 */

export interface Token {
  /** The token text, exactly as it appears in the input. */
  text: string;
  /** Offset of the first character, 0-based. */
  start: number;
  /** Offset one past the last character (half-open range [start, end)). */
  end: number;
}

/** Split on whitespace; every maximal run of non-space characters is one
 * token. Offsets index into the original string. */
export function tokenize(text: string): Token[] {
  const tokens: Token[] = [];
  const matcher = /\S+/g;
  let match: RegExpExecArray | null;
  while ((match = matcher.exec(text)) !== null) {
    tokens.push({
      text: match[0],
      start: match.index,
      end: match.index + match[0].length,
    });
  }
  return tokens;
}

/**
 * Indices of the tokens a character span touches. A token counts as
 * inside the span when the two half-open character ranges overlap at
 * all, so a span may start or end mid-token and still select it.
 */
export function tokensInSpan(
  tokens: Token[],
  start: number,
  end: number,
): number[] {
  const selected: number[] = [];
  tokens.forEach((token, index) => {
    if (token.start < end && token.end > start) {
      selected.push(index);
    }
  });
  return selected;
}
