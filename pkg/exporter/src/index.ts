export {
  Conversion,
  convert,
  convertGradientBoosting,
  convertRandomForest,
  modelDepth,
} from "./convert.js";
export { floorToFloat32, prevFloat32, roundToFloat32 } from "./float32.js";
export {
  BoostingDump,
  Dump,
  ForestDump,
  Model,
  ModelNode,
  dumpSchema,
  modelSchema,
} from "./schema.js";
