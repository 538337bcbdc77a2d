/**
 * Conversion of scikit-learn ensemble dumps into the verifier model format.
 *
 * Forests become trees with per-leaf class-frequency tuples and
 * divide-by-count post-processing, so the averaged probabilities match the
 * source library.  Boosting models become per-class trees with
 * learning-rate-scaled log-domain leaves plus a leading constant tree for
 * the initial raw prediction, under softmax post-processing.  Tree depth is
 * passed through unchanged.
 */

import {
  BoostingDump,
  Dump,
  DumpTree,
  ForestDump,
  Model,
  ModelNode,
  dumpSchema,
  modelSchema,
} from "./schema.js";
import { floorToFloat32, roundToFloat32 } from "./float32.js";

export interface Conversion {
  model: Model;
  /** thresholds whose float32 representation had to be adjusted downward */
  warnings: string[];
}

function convertNodes(
  tree: DumpTree,
  index: number,
  nFeatures: number,
  leafValue: (index: number) => number[],
  warnings: string[],
  treeLabel: string,
): ModelNode {
  if (tree.children_left[index] < 0) {
    return { value: leafValue(index) };
  }
  const feature = tree.feature[index];
  if (feature < 0 || feature >= nFeatures) {
    throw new Error(
      `${treeLabel}: node ${index} splits on unsupported feature ${feature} ` +
        "(multivariate or transformed splits are not convertible)",
    );
  }
  const raw = tree.threshold[index];
  const threshold = floorToFloat32(raw);
  if (threshold !== raw) {
    warnings.push(
      `${treeLabel}: node ${index} threshold ${raw} floored to float32 ${threshold}`,
    );
  }
  return {
    feature,
    threshold,
    left: convertNodes(
      tree,
      tree.children_left[index],
      nFeatures,
      leafValue,
      warnings,
      treeLabel,
    ),
    right: convertNodes(
      tree,
      tree.children_right[index],
      nFeatures,
      leafValue,
      warnings,
      treeLabel,
    ),
  };
}

function metadata(dump: Dump): Record<string, unknown> {
  return {
    source_library: dump.library,
    source_version: dump.library_version,
    source_kind: dump.kind,
    training_params: dump.params,
  };
}

export function convertRandomForest(dump: ForestDump): Conversion {
  const warnings: string[] = [];
  const trees = dump.trees.map((tree, b) => {
    const leafValue = (index: number) => {
      const counts = tree.value[index];
      if (counts.length !== dump.n_classes) {
        throw new Error(
          `tree ${b}: leaf ${index} has ${counts.length} class counts, ` +
            `expected ${dump.n_classes}`,
        );
      }
      const total = counts.reduce((a, c) => a + c, 0);
      if (!(total > 0) || counts.some((c) => c < 0)) {
        throw new Error(`tree ${b}: leaf ${index} has invalid class counts`);
      }
      return counts.map((c) => roundToFloat32(c / total));
    };
    return convertNodes(tree, 0, dump.n_features, leafValue, warnings, `tree ${b}`);
  });
  const model = modelSchema.parse({
    nb_inputs: dump.n_features,
    nb_outputs: dump.n_classes,
    post_process: "divisor",
    trees,
    metadata: metadata(dump),
  });
  return { model, warnings };
}

export function convertGradientBoosting(dump: BoostingDump): Conversion {
  const warnings: string[] = [];
  const m = dump.n_classes;
  const columns = dump.columns;
  if (dump.init_raw.length !== columns) {
    throw new Error(
      `init_raw has ${dump.init_raw.length} entries, expected ${columns}`,
    );
  }
  // a binary model carries one raw score; softmax([0, raw]) is its sigmoid
  const slotBase = m - columns;

  const initVec = new Array<number>(m).fill(0);
  dump.init_raw.forEach((v, k) => {
    initVec[slotBase + k] = roundToFloat32(v);
  });
  const trees: ModelNode[] = [{ value: initVec }];

  dump.stages.forEach((stage, s) => {
    if (stage.length !== columns) {
      throw new Error(`stage ${s} has ${stage.length} trees, expected ${columns}`);
    }
    stage.forEach((tree, k) => {
      const leafValue = (index: number) => {
        const vec = new Array<number>(m).fill(0);
        vec[slotBase + k] = roundToFloat32(
          dump.learning_rate * tree.value[index][0],
        );
        return vec;
      };
      trees.push(
        convertNodes(
          tree,
          0,
          dump.n_features,
          leafValue,
          warnings,
          `stage ${s} class ${k}`,
        ),
      );
    });
  });

  const model = modelSchema.parse({
    nb_inputs: dump.n_features,
    nb_outputs: m,
    post_process: "softmax",
    trees,
    metadata: metadata(dump),
  });
  return { model, warnings };
}

export function convert(document: unknown): Conversion {
  const dump = dumpSchema.parse(document);
  return dump.kind === "random_forest"
    ? convertRandomForest(dump)
    : convertGradientBoosting(dump);
}

export function modelDepth(node: ModelNode): number {
  if ("value" in node) return 0;
  return 1 + Math.max(modelDepth(node.left), modelDepth(node.right));
}
