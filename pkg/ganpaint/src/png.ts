/**
 * 8-bit RGB PNG ingest/egress on float arrays in [0, 1].
 *
 * Decoded pixels arrive RGBA regardless of the source color type; the
 * alpha channel is dropped.  Egress rounds v*255 to the nearest byte.
 */

import * as fs from "fs";
import { PNG } from "pngjs";

export interface FloatImage {
  width: number;
  height: number;
  /** Row-major HWC, 3 channels, values in [0, 1]. */
  data: Float32Array;
}

export class PngError extends Error {}

export function readPng(file: string): FloatImage {
  let png: PNG;
  try {
    png = PNG.sync.read(fs.readFileSync(file));
  } catch (err) {
    throw new PngError(`cannot decode ${file}: ${(err as Error).message}`);
  }
  const { width, height } = png;
  const out = new Float32Array(width * height * 3);
  for (let i = 0; i < width * height; i++) {
    out[i * 3 + 0] = png.data[i * 4 + 0] / 255;
    out[i * 3 + 1] = png.data[i * 4 + 1] / 255;
    out[i * 3 + 2] = png.data[i * 4 + 2] / 255;
  }
  return { width, height, data: out };
}

export function writePng(file: string, image: FloatImage): void {
  const { width, height, data } = image;
  if (data.length !== width * height * 3) {
    throw new PngError(
      `buffer holds ${data.length} floats, expected ${width * height * 3}`,
    );
  }
  const png = new PNG({ width, height });
  for (let i = 0; i < width * height; i++) {
    for (let c = 0; c < 3; c++) {
      const v = Math.round(Math.min(1, Math.max(0, data[i * 3 + c])) * 255);
      png.data[i * 4 + c] = v;
    }
    png.data[i * 4 + 3] = 255;
  }
  fs.writeFileSync(file, PNG.sync.write(png, { colorType: 2 }));
}
