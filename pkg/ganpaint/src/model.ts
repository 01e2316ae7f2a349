/**
 * Rudimentary autoencoder generator and a small convolutional
 * discriminator.
 *
 * Both networks are fully convolutional (the discriminator ends in
 * global average pooling), so one build handles any square side that
 * is a multiple of 4 and at least 8 — the two stride-2 stages halve
 * the grid twice and the two upsampling stages restore it exactly.
 *
 * Every layer takes a seeded initializer derived from the base seed,
 * so identical seeds build identical networks.
 */

import * as fs from "fs";
import * as path from "path";

import * as tf from "@tensorflow/tfjs";

export const MIN_SIDE = 8;

/** True when a generator built here maps (side x side) to itself. */
export function sideSupported(side: number): boolean {
  return Number.isInteger(side) && side >= MIN_SIDE && side % 4 === 0;
}

function glorot(seed: number) {
  return tf.initializers.glorotUniform({ seed });
}

/** Encoder–decoder generator: 3 channels in, 3 sigmoid channels out. */
export function buildGenerator(seed = 0): tf.LayersModel {
  const model = tf.sequential({ name: "generator" });
  model.add(
    tf.layers.conv2d({
      inputShape: [null, null, 3] as unknown as number[],
      filters: 16,
      kernelSize: 3,
      padding: "same",
      activation: "relu",
      kernelInitializer: glorot(seed + 1),
    }),
  );
  model.add(
    tf.layers.conv2d({
      filters: 16,
      kernelSize: 3,
      strides: 2,
      padding: "same",
      activation: "relu",
      kernelInitializer: glorot(seed + 2),
    }),
  );
  model.add(
    tf.layers.conv2d({
      filters: 32,
      kernelSize: 3,
      strides: 2,
      padding: "same",
      activation: "relu",
      kernelInitializer: glorot(seed + 3),
    }),
  );
  model.add(
    tf.layers.conv2d({
      filters: 32,
      kernelSize: 3,
      padding: "same",
      activation: "relu",
      kernelInitializer: glorot(seed + 4),
    }),
  );
  model.add(tf.layers.upSampling2d({ size: [2, 2] }));
  model.add(
    tf.layers.conv2d({
      filters: 16,
      kernelSize: 3,
      padding: "same",
      activation: "relu",
      kernelInitializer: glorot(seed + 5),
    }),
  );
  model.add(tf.layers.upSampling2d({ size: [2, 2] }));
  model.add(
    tf.layers.conv2d({
      filters: 3,
      kernelSize: 3,
      padding: "same",
      activation: "sigmoid",
      kernelInitializer: glorot(seed + 6),
    }),
  );
  return model;
}

/** Conv stack + global average pooling + sigmoid probability. */
export function buildDiscriminator(seed = 0): tf.LayersModel {
  const model = tf.sequential({ name: "discriminator" });
  model.add(
    tf.layers.conv2d({
      inputShape: [null, null, 3] as unknown as number[],
      filters: 16,
      kernelSize: 3,
      strides: 2,
      padding: "same",
      activation: "relu",
      kernelInitializer: glorot(seed + 101),
    }),
  );
  model.add(
    tf.layers.conv2d({
      filters: 32,
      kernelSize: 3,
      strides: 2,
      padding: "same",
      activation: "relu",
      kernelInitializer: glorot(seed + 102),
    }),
  );
  model.add(tf.layers.globalAveragePooling2d({}));
  model.add(
    tf.layers.dense({
      units: 1,
      activation: "sigmoid",
      kernelInitializer: glorot(seed + 103),
    }),
  );
  return model;
}

interface CheckpointTensor {
  shape: number[];
  values: number[];
}

/**
 * Persist model weights as plain JSON.  Fine at toy scale and keeps
 * the checkpoint format independent of any runtime IO handlers.
 */
export function saveWeights(model: tf.LayersModel, file: string): void {
  const tensors: CheckpointTensor[] = model.getWeights().map((w) => ({
    shape: w.shape.slice(),
    values: Array.from(w.dataSync()),
  }));
  fs.mkdirSync(path.dirname(path.resolve(file)), { recursive: true });
  fs.writeFileSync(file, JSON.stringify({ tensors }));
}

/** Inverse of {@link saveWeights}; shapes must match the model. */
export function loadWeights(model: tf.LayersModel, file: string): void {
  const raw = JSON.parse(fs.readFileSync(file, "utf-8")) as {
    tensors: CheckpointTensor[];
  };
  const weights = raw.tensors.map((t) =>
    tf.tensor(Float32Array.from(t.values), t.shape),
  );
  model.setWeights(weights);
  weights.forEach((w) => w.dispose());
}
