#!/usr/bin/env python3
"""Generate all four synthetic corpora at a chosen scale.

Usage: python scripts/build_corpora.py [--count N] [--seed S] [--outdir DIR]
"""
import argparse
from pathlib import Path

from connvox import gen_dataset
from connvox.shapegen import DATASET_KINDS


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--count", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--outdir", default="corpora")
    args = parser.parse_args()

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for kind in DATASET_KINDS:
        out = outdir / f"{kind}.vxg"
        manifest = outdir / f"{kind}.manifest.json"
        gen_dataset(kind, args.count, args.seed, out, manifest)
        print(f"{kind}: {out} ({out.stat().st_size} bytes)")


if __name__ == "__main__":
    main()
