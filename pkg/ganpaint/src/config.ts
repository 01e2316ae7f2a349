/**
 * Training configuration for the toy inpainting GAN.
 *
 * The two loss weights must form a convex combination (sum to 1); the
 * default leans almost entirely on reconstruction, which is what keeps
 * a small generator stable at toy scale.
 */

export interface GanConfig {
  /** Weight of the adversarial loss term. */
  lambdaAdv: number;
  /** Weight of the reconstruction loss term. */
  lambdaRec: number;
  /** Adam learning rate for both networks. */
  learningRate: number;
  /** Training epochs. */
  epochs: number;
  /** Block side of the random square masks applied during training. */
  maskBlock: number;
  /** Seed for weight init and mask placement. */
  seed: number;
  /**
   * What the generator is pulled toward: "input" reproduces the masked
   * image it was fed (holes included); "original" targets the intact
   * image, context-encoder style.
   */
  reconstructionTarget: "input" | "original";
}

export const LAMBDA_TOLERANCE = 1e-9;

/** Floor/ceiling for log arguments in the adversarial loss. */
export const EPS = 1e-7;

export const defaultConfig: GanConfig = {
  lambdaAdv: 0.001,
  lambdaRec: 0.999,
  learningRate: 0.002,
  epochs: 30,
  maskBlock: 8,
  seed: 0,
  reconstructionTarget: "input",
};

export class ConfigError extends Error {}

/** Fill in defaults and reject invalid weight combinations. */
export function resolveConfig(partial: Partial<GanConfig> = {}): GanConfig {
  const cfg: GanConfig = { ...defaultConfig, ...partial };
  const sum = cfg.lambdaAdv + cfg.lambdaRec;
  if (Math.abs(sum - 1.0) > LAMBDA_TOLERANCE) {
    throw new ConfigError(
      `loss weights must sum to 1, got lambdaAdv + lambdaRec = ${sum}`,
    );
  }
  if (cfg.lambdaAdv < 0 || cfg.lambdaRec < 0) {
    throw new ConfigError("loss weights must be non-negative");
  }
  if (!(cfg.learningRate > 0)) {
    throw new ConfigError(`learning rate must be positive, got ${cfg.learningRate}`);
  }
  if (!Number.isInteger(cfg.epochs) || cfg.epochs < 1) {
    throw new ConfigError(`epochs must be a positive integer, got ${cfg.epochs}`);
  }
  if (!Number.isInteger(cfg.maskBlock) || cfg.maskBlock < 1) {
    throw new ConfigError(`maskBlock must be a positive integer, got ${cfg.maskBlock}`);
  }
  if (cfg.reconstructionTarget !== "input" && cfg.reconstructionTarget !== "original") {
    throw new ConfigError(
      `reconstructionTarget must be "input" or "original", got ${cfg.reconstructionTarget}`,
    );
  }
  return cfg;
}
