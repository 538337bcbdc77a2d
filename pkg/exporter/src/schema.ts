/**
 * Schemas for the two JSON documents the exporter handles:
 *
 * - the source dump written by scripts/dump_sklearn.py: a library-neutral
 *   snapshot of a fitted scikit-learn ensemble (node arrays per tree);
 * - the verifier model format emitted by the converter.
 */

import { z } from "zod";

// --- source dumps -----------------------------------------------------------

export const dumpTreeSchema = z
  .object({
    children_left: z.array(z.number().int()),
    children_right: z.array(z.number().int()),
    feature: z.array(z.number().int()),
    threshold: z.array(z.number()),
    value: z.array(z.array(z.number())),
  })
  .refine(
    (t) =>
      t.children_right.length === t.children_left.length &&
      t.feature.length === t.children_left.length &&
      t.threshold.length === t.children_left.length &&
      t.value.length === t.children_left.length,
    { message: "node arrays have inconsistent lengths" },
  );

export type DumpTree = z.infer<typeof dumpTreeSchema>;

const dumpBaseSchema = z.object({
  library: z.string(),
  library_version: z.string(),
  n_features: z.number().int().positive(),
  n_classes: z.number().int().min(2),
  params: z.record(z.unknown()),
});

export const forestDumpSchema = dumpBaseSchema.extend({
  kind: z.literal("random_forest"),
  trees: z.array(dumpTreeSchema).nonempty(),
});

export const boostingDumpSchema = dumpBaseSchema.extend({
  kind: z.literal("gradient_boosting"),
  learning_rate: z.number(),
  columns: z.number().int().positive(),
  init_raw: z.array(z.number()),
  stages: z.array(z.array(dumpTreeSchema).nonempty()).nonempty(),
});

export const dumpSchema = z.discriminatedUnion("kind", [
  forestDumpSchema,
  boostingDumpSchema,
]);

export type ForestDump = z.infer<typeof forestDumpSchema>;
export type BoostingDump = z.infer<typeof boostingDumpSchema>;
export type Dump = z.infer<typeof dumpSchema>;

// --- verifier model format --------------------------------------------------

export type ModelNode =
  | { value: number[] }
  | { feature: number; threshold: number; left: ModelNode; right: ModelNode };

export const modelNodeSchema: z.ZodType<ModelNode> = z.lazy(() =>
  z.union([
    z.object({ value: z.array(z.number()) }).strict(),
    z
      .object({
        feature: z.number().int().nonnegative(),
        threshold: z.number(),
        left: modelNodeSchema,
        right: modelNodeSchema,
      })
      .strict(),
  ]),
);

export const modelSchema = z
  .object({
    nb_inputs: z.number().int().positive(),
    nb_outputs: z.number().int().positive(),
    post_process: z.enum(["none", "divisor", "softmax"]),
    trees: z.array(modelNodeSchema).nonempty(),
    metadata: z.record(z.unknown()).optional(),
  })
  .strict();

export type Model = z.infer<typeof modelSchema>;
