#!/usr/bin/env python3
"""Write a seeded 2000/500 MNIST subset as IDX files.

The source is the 5000-sample MNIST extract that ships inside the mlxtend
package (mlxtend/data/data/mnist_5k.csv.gz, 500 images per digit). Pass
--csv to point at a copy of that file directly instead.

    python3 tools/make_mnist_subset.py --out data/mnist-subset
"""

import argparse
import gzip
import os
import struct

import numpy as np


def find_csv():
    import mlxtend.data

    path = os.path.join(os.path.dirname(mlxtend.data.__file__), "data", "mnist_5k.csv.gz")
    if not os.path.exists(path):
        raise SystemExit(f"not found: {path}")
    return path


def write_images(path, images):
    n, rows, cols = images.shape
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, n, rows, cols))
        f.write(images.astype(np.uint8).tobytes())


def write_labels(path, labels):
    with open(path, "wb") as f:
        f.write(struct.pack(">II", 0x00000801, len(labels)))
        f.write(labels.astype(np.uint8).tobytes())


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--csv", default=None)
    ap.add_argument("--out", default="data/mnist-subset")
    ap.add_argument("--train", type=int, default=2000)
    ap.add_argument("--test", type=int, default=500)
    ap.add_argument("--seed", type=int, default=20200101)
    args = ap.parse_args()

    with gzip.open(args.csv or find_csv(), "rt") as f:
        table = np.loadtxt(f, delimiter=",", dtype=np.int64)
    pixels, labels = table[:, :-1], table[:, -1]
    assert pixels.shape[1] == 784 and pixels.min() >= 0 and pixels.max() <= 255

    order = np.random.default_rng(args.seed).permutation(len(labels))
    train = order[: args.train]
    test = order[args.train : args.train + args.test]

    os.makedirs(args.out, exist_ok=True)
    write_images(os.path.join(args.out, "train-images-idx3-ubyte"), pixels[train].reshape(-1, 28, 28))
    write_labels(os.path.join(args.out, "train-labels-idx1-ubyte"), labels[train])
    write_images(os.path.join(args.out, "t10k-images-idx3-ubyte"), pixels[test].reshape(-1, 28, 28))
    write_labels(os.path.join(args.out, "t10k-labels-idx1-ubyte"), labels[test])
    print(f"wrote {len(train)} train / {len(test)} test samples to {args.out}")
    print("train label counts:", np.bincount(labels[train], minlength=10).tolist())
    print("test label counts:", np.bincount(labels[test], minlength=10).tolist())


if __name__ == "__main__":
    main()
