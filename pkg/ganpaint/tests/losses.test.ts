/**
 * The loss implementations against independent scalar-loop oracles:
 * 100 random batches each, agreement within 1e-6, plus the closed-form
 * spot values and the weight-validation contract.
 */

import { describe, expect, test } from "vitest";
import * as tf from "@tensorflow/tfjs";

import {
  ConfigError,
  EPS,
  ShapeError,
  adversarialLoss,
  reconstructionLoss,
  resolveConfig,
  totalLoss,
  totalLossValue,
} from "../src";

/** Deterministic PRNG so each run checks the same batches. */
function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

function randomArray(rand: () => number, size: number): Float32Array {
  const out = new Float32Array(size);
  for (let i = 0; i < size; i++) out[i] = rand();
  return out;
}

function recOracle(a: Float32Array, b: Float32Array, batch: number): number {
  const per = a.length / batch;
  let total = 0;
  for (let n = 0; n < batch; n++) {
    let sq = 0;
    for (let i = 0; i < per; i++) {
      const d = a[n * per + i] - b[n * per + i];
      sq += d * d;
    }
    total += sq;
  }
  return total / batch;
}

function clamp(v: number): number {
  return Math.min(1 - EPS, Math.max(EPS, v));
}

function advOracle(dReal: Float32Array, dFake: Float32Array): number {
  let real = 0;
  let fake = 0;
  for (let i = 0; i < dReal.length; i++) real += Math.log(clamp(dReal[i]));
  for (let i = 0; i < dFake.length; i++) fake += Math.log(clamp(1 - dFake[i]));
  return real / dReal.length + fake / dFake.length;
}

describe("reconstruction loss", () => {
  test("matches the scalar-loop oracle on 100 random batches", () => {
    // image-scale data: outputs near their targets, as in training
    const rand = mulberry32(11);
    let maxDev = 0;
    for (let trial = 0; trial < 100; trial++) {
      const batch = 1 + Math.floor(rand() * 4);
      const side = 4 + 2 * Math.floor(rand() * 3);
      const size = batch * side * side * 3;
      const a = randomArray(rand, size);
      const b = new Float32Array(size);
      for (let i = 0; i < size; i++) {
        b[i] = Math.fround(a[i] + 0.2 * (rand() - 0.5));
      }
      const got = tf.tidy(() =>
        reconstructionLoss(
          tf.tensor4d(a, [batch, side, side, 3]),
          tf.tensor4d(b, [batch, side, side, 3]),
        ).dataSync()[0],
      );
      maxDev = Math.max(maxDev, Math.abs(got - recOracle(a, b, batch)));
    }
    expect(maxDev).toBeLessThanOrEqual(1e-6);
  });

  test("identical tensors score exactly zero", () => {
    const v = tf.ones([2, 8, 8, 3]) as tf.Tensor4D;
    expect(reconstructionLoss(v, v).dataSync()[0]).toBe(0);
  });

  test("single known difference", () => {
    // one pixel channel off by 0.5 in a batch of 1 -> 0.25
    const a = tf.zeros([1, 4, 4, 3]) as tf.Tensor4D;
    const data = new Float32Array(48);
    data[7] = 0.5;
    const b = tf.tensor4d(data, [1, 4, 4, 3]);
    expect(reconstructionLoss(a, b).dataSync()[0]).toBeCloseTo(0.25, 10);
  });

  test("shape mismatch is rejected", () => {
    const a = tf.zeros([1, 4, 4, 3]) as tf.Tensor4D;
    const b = tf.zeros([1, 8, 8, 3]) as tf.Tensor4D;
    expect(() => reconstructionLoss(a, b)).toThrow(ShapeError);
  });
});

describe("adversarial loss", () => {
  test("matches the scalar-loop oracle on 100 random batches", () => {
    const rand = mulberry32(22);
    let maxDev = 0;
    for (let trial = 0; trial < 100; trial++) {
      const n = 1 + Math.floor(rand() * 16);
      const real = randomArray(rand, n);
      const fake = randomArray(rand, n);
      const got = tf.tidy(() =>
        adversarialLoss(tf.tensor1d(real), tf.tensor1d(fake)).dataSync()[0],
      );
      maxDev = Math.max(maxDev, Math.abs(got - advOracle(real, fake)));
    }
    expect(maxDev).toBeLessThanOrEqual(1e-6);
  });

  test("undecided discriminator gives 2 log(1/2)", () => {
    const half = tf.fill([8], 0.5);
    const got = adversarialLoss(half, half).dataSync()[0];
    expect(got).toBeCloseTo(2 * Math.log(0.5), 6);
  });

  test("perfect discriminator saturates near zero", () => {
    const got = adversarialLoss(tf.ones([4]), tf.zeros([4])).dataSync()[0];
    // both logs clamp at log(1 - EPS); tensors store 1 - EPS in float32
    expect(got).toBeCloseTo(2 * Math.log(Math.fround(1 - EPS)), 10);
    expect(Math.abs(got)).toBeLessThan(1e-5);
  });

  test("saturated-wrong discriminator stays finite", () => {
    const got = adversarialLoss(tf.zeros([4]), tf.ones([4])).dataSync()[0];
    expect(Number.isFinite(got)).toBe(true);
    expect(got).toBeCloseTo(2 * Math.log(EPS), 4);
  });

  test("batch mean equals the repeated single sample", () => {
    const single = adversarialLoss(
      tf.tensor1d([0.7]),
      tf.tensor1d([0.2]),
    ).dataSync()[0];
    const batch = adversarialLoss(
      tf.fill([16], 0.7),
      tf.fill([16], 0.2),
    ).dataSync()[0];
    expect(batch).toBeCloseTo(single, 10);
  });
});

describe("total loss", () => {
  test("convex combination on 100 random weight pairs", () => {
    const rand = mulberry32(33);
    for (let trial = 0; trial < 100; trial++) {
      const lambdaAdv = rand();
      const cfg = resolveConfig({ lambdaAdv, lambdaRec: 1 - lambdaAdv });
      const a = rand() * 10 - 5;
      const r = rand() * 10;
      const expected = cfg.lambdaAdv * a + cfg.lambdaRec * r;
      expect(totalLossValue(a, r, cfg)).toBeCloseTo(expected, 10);
      const tensor = totalLoss(tf.scalar(a), tf.scalar(r), cfg).dataSync()[0];
      expect(Math.abs(tensor - expected)).toBeLessThanOrEqual(1e-6);
    }
  });

  test("degenerate weights pass everything through", () => {
    const recOnly = resolveConfig({ lambdaAdv: 0, lambdaRec: 1 });
    expect(totalLossValue(123.0, 4.5, recOnly)).toBeCloseTo(4.5, 12);
    const advOnly = resolveConfig({ lambdaAdv: 1, lambdaRec: 0 });
    expect(totalLossValue(-1.25, 99.0, advOnly)).toBeCloseTo(-1.25, 12);
  });

  test("half-and-half splits the difference", () => {
    const cfg = resolveConfig({ lambdaAdv: 0.5, lambdaRec: 0.5 });
    expect(totalLossValue(2, 4, cfg)).toBeCloseTo(3, 12);
  });

  test("monotone in each component for fixed weights", () => {
    const cfg = resolveConfig({ lambdaAdv: 0.3, lambdaRec: 0.7 });
    expect(totalLossValue(1, 5, cfg)).toBeLessThan(totalLossValue(2, 5, cfg));
    expect(totalLossValue(1, 5, cfg)).toBeLessThan(totalLossValue(1, 6, cfg));
  });

  test("weights that do not sum to one are rejected", () => {
    expect(() => resolveConfig({ lambdaAdv: 0.5, lambdaRec: 0.6 })).toThrow(
      ConfigError,
    );
    expect(() => resolveConfig({ lambdaAdv: 0.2, lambdaRec: 0.2 })).toThrow(
      ConfigError,
    );
    const stale = { ...resolveConfig({}), lambdaAdv: 0.5 };
    expect(() => totalLossValue(1, 1, stale)).toThrow(ConfigError);
  });

  test("default weights are valid and reconstruction-heavy", () => {
    const cfg = resolveConfig({});
    expect(cfg.lambdaAdv + cfg.lambdaRec).toBeCloseTo(1, 12);
    expect(cfg.lambdaRec).toBeGreaterThan(cfg.lambdaAdv);
  });
});
