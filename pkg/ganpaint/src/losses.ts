/**
 * Loss terms for the inpainting GAN.
 *
 * Reconstruction is the batch mean of each image's squared l2 distance
 * to its target.  The adversarial value is the usual two-term log
 * objective, with log arguments clamped away from 0 and 1 so a
 * saturated discriminator cannot produce infinities.  The scalar total
 * is a convex combination of the two, weighted by the config.
 */

import * as tf from "@tensorflow/tfjs";

import { EPS, GanConfig, ConfigError, LAMBDA_TOLERANCE } from "./config";

export class ShapeError extends Error {}

/**
 * Mean over the batch of per-image squared l2 distance.
 *
 * Both tensors must be rank-4 NHWC and identically shaped.
 */
export function reconstructionLoss(gOut: tf.Tensor4D, target: tf.Tensor4D): tf.Scalar {
  if (gOut.rank !== 4 || target.rank !== 4) {
    throw new ShapeError(
      `expected rank-4 batches, got ranks ${gOut.rank} and ${target.rank}`,
    );
  }
  if (gOut.shape.some((d, i) => d !== target.shape[i])) {
    throw new ShapeError(
      `shape mismatch: ${JSON.stringify(gOut.shape)} vs ${JSON.stringify(target.shape)}`,
    );
  }
  return tf.tidy(() =>
    gOut.sub(target).square().sum([1, 2, 3]).mean(),
  ) as tf.Scalar;
}

/**
 * E[log D(real)] + E[log(1 - D(fake))], log arguments clamped to
 * [EPS, 1 - EPS].  Inputs are discriminator outputs in [0, 1], one
 * per sample (any shape; the mean runs over all entries).
 */
export function adversarialLoss(dReal: tf.Tensor, dFake: tf.Tensor): tf.Scalar {
  return tf.tidy(() => {
    const realTerm = dReal.clipByValue(EPS, 1 - EPS).log().mean();
    const fakeTerm = tf.sub(1, dFake).clipByValue(EPS, 1 - EPS).log().mean();
    return realTerm.add(fakeTerm);
  }) as tf.Scalar;
}

/** lambdaAdv * lAdv + lambdaRec * lRec for plain numbers. */
export function totalLossValue(lAdv: number, lRec: number, cfg: GanConfig): number {
  checkWeights(cfg);
  return cfg.lambdaAdv * lAdv + cfg.lambdaRec * lRec;
}

/** Tensor version of {@link totalLossValue}, usable inside gradients. */
export function totalLoss(lAdv: tf.Scalar, lRec: tf.Scalar, cfg: GanConfig): tf.Scalar {
  checkWeights(cfg);
  return tf.tidy(() =>
    lAdv.mul(cfg.lambdaAdv).add(lRec.mul(cfg.lambdaRec)),
  ) as tf.Scalar;
}

function checkWeights(cfg: GanConfig): void {
  const sum = cfg.lambdaAdv + cfg.lambdaRec;
  if (Math.abs(sum - 1.0) > LAMBDA_TOLERANCE) {
    throw new ConfigError(`loss weights must sum to 1, got ${sum}`);
  }
}
