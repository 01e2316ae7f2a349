/**
 * Toy training loop: random square holes are cut from the dataset
 * images, the generator learns to fill them, and a small discriminator
 * provides the adversarial signal.
 *
 * Per image the hole is drawn once (seeded) and kept fixed across
 * epochs, which makes the loss landscape static and loss curves
 * bit-reproducible for a given seed.  One epoch = one discriminator
 * step and one generator step per image; the logged losses are
 * evaluated after that epoch's updates.
 *
 * Usage:
 *   node dist/train.js --data imgs/ --out runs/toy --epochs 30
 */

import * as fs from "fs";
import * as path from "path";

import * as tf from "@tensorflow/tfjs";

import { ConfigError, GanConfig, resolveConfig } from "./config";
import { adversarialLoss, reconstructionLoss, totalLoss, totalLossValue } from "./losses";
import { buildDiscriminator, buildGenerator, saveWeights, sideSupported } from "./model";
import { FloatImage, readPng } from "./png";

export interface EpochLog {
  epoch: number;
  l_rec: number;
  l_adv: number;
  l_total: number;
}

export interface TrainResult {
  log: EpochLog[];
  /** Path of the saved generator checkpoint. */
  checkpoint: string;
}

export class DatasetError extends Error {}

/** Deterministic 32-bit PRNG for mask placement. */
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

/** Read every .png under dir; all must be square supported sides. */
export function loadDataset(dir: string): FloatImage[] {
  let files: string[];
  try {
    files = fs.readdirSync(dir).filter((f) => f.endsWith(".png")).sort();
  } catch (err) {
    throw new DatasetError(`cannot list ${dir}: ${(err as Error).message}`);
  }
  if (files.length === 0) {
    throw new DatasetError(`no .png files under ${dir}`);
  }
  return files.map((f) => {
    const img = readPng(path.join(dir, f));
    if (img.width !== img.height) {
      throw new DatasetError(`${f} is ${img.width}x${img.height}, expected square`);
    }
    if (!sideSupported(img.width)) {
      throw new DatasetError(
        `${f} side ${img.width} unsupported (need a multiple of 4, >= 8)`,
      );
    }
    return img;
  });
}

interface Sample {
  x: tf.Tensor4D;
  xHat: tf.Tensor4D;
}

/**
 * The raw tf.Variable list backing a model's trainable weights.
 * LayerVariable types its `val` field protected, but minimize() needs
 * the variables themselves to scope each optimizer to one network.
 */
function trainableVars(model: tf.LayersModel): tf.Variable[] {
  return model.trainableWeights.map(
    (w) => (w as unknown as { val: tf.Variable }).val,
  );
}

/** Cut one seeded square hole (zeroed) out of each image. */
function makeSamples(images: FloatImage[], cfg: GanConfig): Sample[] {
  const rand = mulberry32(cfg.seed);
  return images.map((img) => {
    const side = img.width;
    if (cfg.maskBlock >= side) {
      throw new ConfigError(
        `maskBlock ${cfg.maskBlock} must be smaller than image side ${side}`,
      );
    }
    const r = Math.floor(rand() * (side - cfg.maskBlock + 1));
    const c = Math.floor(rand() * (side - cfg.maskBlock + 1));
    const hole = new Float32Array(img.data);
    for (let i = r; i < r + cfg.maskBlock; i++) {
      for (let j = c; j < c + cfg.maskBlock; j++) {
        const base = (i * side + j) * 3;
        hole[base] = 0;
        hole[base + 1] = 0;
        hole[base + 2] = 0;
      }
    }
    const x = tf.tensor4d(img.data, [1, side, side, 3]);
    const xHat = tf.tensor4d(hole, [1, side, side, 3]);
    return { x, xHat };
  });
}

/**
 * Train on every PNG under dataDir and save the generator.
 *
 * Writes outDir/generator.json (checkpoint) and outDir/losses.jsonl
 * (one JSON object per epoch), and returns the parsed log.
 */
export function train(
  dataDir: string,
  partial: Partial<GanConfig> = {},
  outDir = "runs/ganpaint",
): TrainResult {
  const cfg = resolveConfig(partial);
  const samples = makeSamples(loadDataset(dataDir), cfg);

  const generator = buildGenerator(cfg.seed);
  const discriminator = buildDiscriminator(cfg.seed);
  const gVars = trainableVars(generator);
  const dVars = trainableVars(discriminator);
  const gOptimizer = tf.train.adam(cfg.learningRate);
  const dOptimizer = tf.train.adam(cfg.learningRate);

  const log: EpochLog[] = [];
  fs.mkdirSync(outDir, { recursive: true });
  const logPath = path.join(outDir, "losses.jsonl");
  fs.writeFileSync(logPath, "");

  for (let epoch = 1; epoch <= cfg.epochs; epoch++) {
    for (const { x, xHat } of samples) {
      const target = cfg.reconstructionTarget === "original" ? x : xHat;

      // discriminator ascends the adversarial value
      dOptimizer.minimize(
        () =>
          tf.tidy(() => {
            const fake = generator.predict(xHat) as tf.Tensor4D;
            const lAdv = adversarialLoss(
              discriminator.predict(x) as tf.Tensor,
              discriminator.predict(fake) as tf.Tensor,
            );
            return lAdv.neg() as tf.Scalar;
          }),
        false,
        dVars,
      );

      // generator descends the weighted total
      gOptimizer.minimize(
        () =>
          tf.tidy(() => {
            const fake = generator.predict(xHat) as tf.Tensor4D;
            const lAdv = adversarialLoss(
              discriminator.predict(x) as tf.Tensor,
              discriminator.predict(fake) as tf.Tensor,
            );
            const lRec = reconstructionLoss(fake, target);
            return totalLoss(lAdv, lRec, cfg);
          }),
        false,
        gVars,
      );
    }

    // post-update evaluation, averaged over the dataset
    let recSum = 0;
    let advSum = 0;
    tf.tidy(() => {
      for (const { x, xHat } of samples) {
        const target = cfg.reconstructionTarget === "original" ? x : xHat;
        const fake = generator.predict(xHat) as tf.Tensor4D;
        recSum += reconstructionLoss(fake, target).dataSync()[0];
        advSum += adversarialLoss(
          discriminator.predict(x) as tf.Tensor,
          discriminator.predict(fake) as tf.Tensor,
        ).dataSync()[0];
      }
    });
    const lRec = recSum / samples.length;
    const lAdv = advSum / samples.length;
    const entry: EpochLog = {
      epoch,
      l_rec: lRec,
      l_adv: lAdv,
      l_total: totalLossValue(lAdv, lRec, cfg),
    };
    log.push(entry);
    fs.appendFileSync(logPath, JSON.stringify(entry) + "\n");
  }

  const checkpoint = path.join(outDir, "generator.json");
  saveWeights(generator, checkpoint);

  samples.forEach(({ x, xHat }) => {
    x.dispose();
    xHat.dispose();
  });
  return { log, checkpoint };
}

function usage(): never {
  console.error(
    "usage: node dist/train.js --data DIR [--out DIR] [--epochs N] " +
      "[--lr F] [--lambda-rec F] [--lambda-adv F] [--mask-block N] " +
      "[--seed N] [--target input|original]",
  );
  process.exit(1);
}

export function main(argv: string[]): number {
  let dataDir: string | undefined;
  let outDir = "runs/ganpaint";
  const partial: Partial<GanConfig> = {};
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i];
    const value = () => {
      i += 1;
      if (i >= argv.length) usage();
      return argv[i];
    };
    switch (flag) {
      case "--data":
        dataDir = value();
        break;
      case "--out":
        outDir = value();
        break;
      case "--epochs":
        partial.epochs = Number(value());
        break;
      case "--lr":
        partial.learningRate = Number(value());
        break;
      case "--lambda-rec":
        partial.lambdaRec = Number(value());
        break;
      case "--lambda-adv":
        partial.lambdaAdv = Number(value());
        break;
      case "--mask-block":
        partial.maskBlock = Number(value());
        break;
      case "--seed":
        partial.seed = Number(value());
        break;
      case "--target":
        partial.reconstructionTarget = value() as GanConfig["reconstructionTarget"];
        break;
      default:
        usage();
    }
  }
  if (!dataDir) usage();

  try {
    const result = train(dataDir, partial, outDir);
    for (const entry of result.log) {
      console.log(JSON.stringify(entry));
    }
    console.log(`saved ${result.checkpoint}`);
    return 0;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 2;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
