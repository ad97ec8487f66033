#!/usr/bin/env python3
"""Convert the digit JSON files shipped in the npm `mnist` package into IDX files.

The npm package (https://www.npmjs.com/package/mnist) bundles 10,000 real MNIST
digits as 784-float vectors in [0,1] rounded to three decimals. This script
maps them back to bytes, shuffles with a fixed seed and writes an IDX
train/test pair that the C++ loader reads like the original distribution.

    npm pack mnist && tar xzf mnist-*.tgz
    python3 tools/mnist_npm_to_idx.py package/src/digits data/mnist --train 4000 --test 1000
"""
import argparse
import json
import pathlib
import random
import struct


def read_digits(digits_dir):
    samples = []
    for label in range(10):
        blob = json.loads((digits_dir / f"{label}.json").read_text())["data"]
        if len(blob) % 784:
            raise ValueError(f"{label}.json: length {len(blob)} not a multiple of 784")
        for k in range(len(blob) // 784):
            pixels = bytes(min(255, max(0, round(v * 255))) for v in blob[k * 784:(k + 1) * 784])
            samples.append((pixels, label))
    return samples


def write_idx(out_dir, prefix, samples):
    with open(out_dir / f"{prefix}-images-idx3-ubyte", "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, len(samples), 28, 28))
        for pixels, _ in samples:
            f.write(pixels)
    with open(out_dir / f"{prefix}-labels-idx1-ubyte", "wb") as f:
        f.write(struct.pack(">II", 0x00000801, len(samples)))
        f.write(bytes(label for _, label in samples))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("digits_dir", type=pathlib.Path)
    ap.add_argument("out_dir", type=pathlib.Path)
    ap.add_argument("--train", type=int, default=4000)
    ap.add_argument("--test", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=20231)
    args = ap.parse_args()

    samples = read_digits(args.digits_dir)
    if args.train + args.test > len(samples):
        raise SystemExit(f"requested {args.train + args.test} samples, only {len(samples)} available")
    random.Random(args.seed).shuffle(samples)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    write_idx(args.out_dir, "train", samples[:args.train])
    write_idx(args.out_dir, "t10k", samples[args.train:args.train + args.test])
    print(f"wrote {args.train} train / {args.test} test samples to {args.out_dir}")


if __name__ == "__main__":
    main()
