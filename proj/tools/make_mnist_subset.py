#!/usr/bin/env python3
# Copyright 2026 The HyFL-Sim Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#   http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Builds the bundled desk-scale MNIST subset in IDX format.

Source: the 5000-sample MNIST extract shipped inside the mlxtend wheel
(mlxtend/data/data/mnist_5k.csv.gz, label in the last column, 500 rows
per digit sorted by class). Each digit contributes 400 rows to the training
split and 100 to the test split; both splits are shuffled with a fixed seed.

  pip download --no-deps -d /tmp/whl mlxtend
  python3 tools/make_mnist_subset.py /tmp/whl/mlxtend-*.whl data/mnist-desk
"""
import gzip
import io
import struct
import sys
import zipfile
from pathlib import Path

import numpy as np


def write_idx_images(path, images):
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, len(images), 28, 28))
        f.write(images.astype(np.uint8).tobytes())


def write_idx_labels(path, labels):
    with open(path, "wb") as f:
        f.write(struct.pack(">II", 0x00000801, len(labels)))
        f.write(labels.astype(np.uint8).tobytes())


def main():
    wheel, out = sys.argv[1], Path(sys.argv[2])
    out.mkdir(parents=True, exist_ok=True)
    raw = gzip.decompress(
        zipfile.ZipFile(wheel).read("mlxtend/data/data/mnist_5k.csv.gz"))
    table = np.loadtxt(io.BytesIO(raw), delimiter=",")
    images, labels = table[:, :-1], table[:, -1].astype(int)
    train_rows, test_rows = [], []
    for digit in range(10):
        rows = np.flatnonzero(labels == digit)
        train_rows.extend(rows[:400])
        test_rows.extend(rows[400:])
    rng = np.random.default_rng(20240521)
    train_rows = rng.permutation(np.array(train_rows))
    test_rows = rng.permutation(np.array(test_rows))
    write_idx_images(out / "train-images-idx3-ubyte", images[train_rows])
    write_idx_labels(out / "train-labels-idx1-ubyte", labels[train_rows])
    write_idx_images(out / "t10k-images-idx3-ubyte", images[test_rows])
    write_idx_labels(out / "t10k-labels-idx1-ubyte", labels[test_rows])
    print("train", np.bincount(labels[train_rows], minlength=10))
    print("test ", np.bincount(labels[test_rows], minlength=10))


if __name__ == "__main__":
    main()
