/**
 * Input row validation. Rows arrive as parsed JSON values, one per
 * non-blank line of the input file:
 *
 *   {"text": "...", "label": "...", "span": [start, end], "id": "..."}
 *
 * `span` and `id` are optional; unknown keys are ignored. Spans are
 * half-open character offsets into `text`.
 */

import { z } from "zod";

export const rowSchema = z.object({
  id: z.string().min(1, "id must be a non-empty string").optional(),
  text: z.string({ required_error: "text is required" }),
  label: z
    .string({ required_error: "label is required" })
    .min(1, "label must be a non-empty string"),
  span: z
    .tuple([z.number().int(), z.number().int()], {
      invalid_type_error: "span must be a [start, end] pair of integers",
    })
    .optional(),
});

export type InputRow = z.infer<typeof rowSchema>;

/** Validate one parsed JSON value; returns the typed row or a message. */
export function validateRow(
  value: unknown,
): { row: InputRow } | { error: string } {
  const result = rowSchema.safeParse(value);
  if (result.success) {
    return { row: result.data };
  }
  const first = result.error.issues[0];
  if (first === undefined) {
    return { error: "invalid row" };
  }
  const where = first.path.length > 0 ? `${first.path.join(".")}: ` : "";
  return { error: `${where}${first.message}` };
}
