export {
  ConfigError,
  EPS,
  GanConfig,
  LAMBDA_TOLERANCE,
  defaultConfig,
  resolveConfig,
} from "./config";
export {
  ShapeError,
  adversarialLoss,
  reconstructionLoss,
  totalLoss,
  totalLossValue,
} from "./losses";
export {
  MIN_SIDE,
  buildDiscriminator,
  buildGenerator,
  loadWeights,
  saveWeights,
  sideSupported,
} from "./model";
export { FloatImage, PngError, readPng, writePng } from "./png";
export { DatasetError, EpochLog, TrainResult, loadDataset, train } from "./train";
export { BridgeOptions, runBridge } from "./bridge";
