#!/usr/bin/env python3
"""Detection quality vs. patch area and count.

Fixes the detector at block size 28 and measures block-level recall,
precision, and leftover patch coverage while the attack budget varies:
single patches of 4/6/8/12% image area, and the same total budget split
across several smaller patches.

Usage:
    python3 scripts/detection_quality.py --out results/quality.json
    python3 scripts/detection_quality.py --areas 0.04 0.06 --counts 1 2
"""

import argparse
import json
from pathlib import Path

import numpy as np

from resurface import (
    DetectorConfig,
    PatchSpec,
    PlacementError,
    ResurfaceConfig,
    evaluate_detection,
    inject_patches,
    resurface,
)

from block_size_sweep import builtin_corpus, load_corpus


def run_condition(images, area, count, seed0, block_size):
    cfg = ResurfaceConfig(detector=DetectorConfig(block_side=block_size),
                          inpainter="zero")
    recalls, precisions, residuals, placed = [], [], [], 0
    for idx, x in enumerate(images):
        spec = PatchSpec(count=count, area_fraction=area, texture="noise",
                         seed=seed0 + idx)
        try:
            patched, truth = inject_patches(x, spec)
        except PlacementError:
            continue
        placed += 1
        report = evaluate_detection(resurface(patched, cfg), truth)
        recalls.append(report.recall)
        precisions.append(report.precision)
        residuals.append(report.residual_overlap)
    return {
        "area_fraction": area,
        "count": count,
        "images": placed,
        "mean_recall": float(np.mean(recalls)) if recalls else None,
        "mean_precision": float(np.mean(precisions)) if precisions else None,
        "mean_residual": float(np.mean(residuals)) if residuals else None,
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--corpus", default=None,
                    help="directory of square PNGs (default: built-in photo crops)")
    ap.add_argument("--images", type=int, default=50, help="corpus size cap")
    ap.add_argument("--areas", type=float, nargs="+",
                    default=[0.04, 0.06, 0.08, 0.12])
    ap.add_argument("--counts", type=int, nargs="+", default=[1, 2, 4])
    ap.add_argument("--block-size", type=int, default=28)
    ap.add_argument("--seed", type=int, default=1000, help="base patch seed")
    ap.add_argument("--out", default="results/detection_quality.json")
    args = ap.parse_args()

    images = (load_corpus(args.corpus, args.images) if args.corpus
              else builtin_corpus(args.images))

    rows = []
    print(f"{'area':>5}  {'count':>5}  {'images':>6}  {'recall':>7}  "
          f"{'precision':>9}  {'residual':>8}")
    for area in args.areas:
        for count in args.counts:
            row = run_condition(images, area, count, args.seed, args.block_size)
            rows.append(row)
            rec = "-" if row["mean_recall"] is None else f"{row['mean_recall']:.3f}"
            pre = ("-" if row["mean_precision"] is None
                   else f"{row['mean_precision']:.3f}")
            res = ("-" if row["mean_residual"] is None
                   else f"{row['mean_residual']:.3f}")
            print(f"{area:>5.2f}  {count:>5}  {row['images']:>6}  {rec:>7}  "
                  f"{pre:>9}  {res:>8}")

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    payload = {"block_size": args.block_size, "seed": args.seed, "rows": rows}
    out.write_text(json.dumps(payload, indent=2) + "\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
