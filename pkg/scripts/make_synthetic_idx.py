#!/usr/bin/env python3
"""Fabricate a tiny MNIST-shaped IDX dataset for smoke-testing.

Writes the four files the loader expects into a directory.  Each class
is a distinct bright block on a noisy background, so simple models can
actually separate them; this is for exercising the data path, not for
benchmarking accuracy.

    python scripts/make_synthetic_idx.py --out-dir /tmp/fake-mnist
    DESCENTLAB_DATA=/tmp/fake-mnist descentlab rff-sweep --config configs/rff_sweep_mnist.cfg
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from descentlab.harness.datasets import write_idx
from descentlab.seeding import substream

SIDE = 28
N_CLASSES = 10


def _images_for(labels: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """One 6x6 bright block per class at a class-specific offset."""
    images = rng.integers(0, 40, size=(labels.size, SIDE, SIDE))
    for i, label in enumerate(labels):
        row = 2 + 2 * (int(label) % 5)
        col = 3 + 9 * (int(label) // 5)
        images[i, row : row + 6, col : col + 6] = rng.integers(180, 256, size=(6, 6))
    return images.astype(np.uint8)


def _split(n: int, rng: np.random.Generator) -> np.ndarray:
    base = np.arange(n) % N_CLASSES
    return rng.permutation(base).astype(np.uint8)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out-dir", default="fake-mnist", help="where to put the IDX files")
    parser.add_argument("--n-train", type=int, default=600)
    parser.add_argument("--n-test", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    if args.n_train < N_CLASSES or args.n_test < N_CLASSES:
        print(f"need at least {N_CLASSES} samples per split", file=sys.stderr)
        return 2

    os.makedirs(args.out_dir, exist_ok=True)
    for split, count in (("train", args.n_train), ("t10k", args.n_test)):
        rng = substream(args.seed, f"fake-mnist-{split}")
        labels = _split(count, rng)
        images = _images_for(labels, rng)
        write_idx(os.path.join(args.out_dir, f"{split}-images-idx3-ubyte"), images)
        write_idx(os.path.join(args.out_dir, f"{split}-labels-idx1-ubyte"), labels)
        print(f"{split}: {count} images")

    print(f"export DESCENTLAB_DATA={args.out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
