/**
 * File-protocol inpainting server.
 *
 * The caller hands us a workspace directory holding cropped.png (the
 * image with suspect blocks zeroed) and mask.png (255 on masked
 * pixels).  We must leave behind generated.png with identical
 * dimensions and exit 0; any problem is a nonzero exit with a
 * diagnostic on stderr.  The caller composes masked pixels from our
 * output and discards the rest, so the generator simply proposes a
 * full image.
 *
 * Usage:
 *   node dist/bridge.js [--model ckpt.json] [--seed N] <workspace>
 */

import * as fs from "fs";
import * as path from "path";

import * as tf from "@tensorflow/tfjs";

import { buildGenerator, loadWeights, sideSupported } from "./model";
import { readPng, writePng } from "./png";

export interface BridgeOptions {
  /** Generator checkpoint (JSON from saveWeights); fresh seeded net if absent. */
  model?: string;
  seed?: number;
}

/** Serve one workspace; returns the intended process exit code. */
export function runBridge(workspace: string, opts: BridgeOptions = {}): number {
  const croppedPath = path.join(workspace, "cropped.png");
  const maskPath = path.join(workspace, "mask.png");
  for (const p of [croppedPath, maskPath]) {
    if (!fs.existsSync(p)) {
      console.error(`error: missing ${path.basename(p)} in ${workspace}`);
      return 2;
    }
  }

  let cropped;
  let mask;
  try {
    cropped = readPng(croppedPath);
    mask = readPng(maskPath);
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 2;
  }
  if (cropped.width !== mask.width || cropped.height !== mask.height) {
    console.error(
      `error: cropped is ${cropped.width}x${cropped.height} but mask is ` +
        `${mask.width}x${mask.height}`,
    );
    return 2;
  }
  if (cropped.width !== cropped.height || !sideSupported(cropped.width)) {
    console.error(
      `error: image is ${cropped.width}x${cropped.height}; the generator ` +
        "needs a square side that is a multiple of 4 and at least 8",
    );
    return 2;
  }

  const generator = buildGenerator(opts.seed ?? 0);
  if (opts.model) {
    try {
      loadWeights(generator, opts.model);
    } catch (err) {
      console.error(`error: cannot load ${opts.model}: ${(err as Error).message}`);
      return 2;
    }
  }

  const side = cropped.width;
  const out = tf.tidy(() => {
    const x = tf.tensor4d(cropped.data, [1, side, side, 3]);
    const y = generator.predict(x) as tf.Tensor4D;
    return y.clipByValue(0, 1);
  });
  const values = out.dataSync() as Float32Array;
  out.dispose();

  writePng(path.join(workspace, "generated.png"), {
    width: side,
    height: side,
    data: Float32Array.from(values),
  });
  return 0;
}

function usage(): never {
  console.error("usage: node dist/bridge.js [--model ckpt.json] [--seed N] <workspace>");
  process.exit(1);
}

export function main(argv: string[]): number {
  const opts: BridgeOptions = {};
  let workspace: string | undefined;
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i];
    if (flag === "--model") {
      i += 1;
      if (i >= argv.length) usage();
      opts.model = argv[i];
    } else if (flag === "--seed") {
      i += 1;
      if (i >= argv.length) usage();
      opts.seed = Number(argv[i]);
    } else if (workspace === undefined) {
      workspace = flag;
    } else {
      usage();
    }
  }
  if (!workspace) usage();
  return runBridge(workspace, opts);
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
