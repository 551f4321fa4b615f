#!/usr/bin/env python3
"""Self-evaluate freshly generated corpora and print metric tables.

Generates two disjoint-seed corpora per dataset kind (a stand-in "real" and
"generated" split), evaluates them against each other, and prints the same
table the CLI would. Useful for eyeballing the metric suite end to end.

Usage: python scripts/corpus_tables.py [--count N]
"""
import argparse

from connvox import evaluate_corpus
from connvox.shapegen import DATASET_KINDS, default_config, generate_sample


def build(kind, count, base_seed):
    config = default_config(kind)
    return [generate_sample(kind, config, base_seed + i)[0] for i in range(count)]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--count", type=int, default=200)
    args = parser.parse_args()

    for kind in DATASET_KINDS:
        real = build(kind, args.count, 0)
        generated = build(kind, args.count, 10_000_000)
        report = evaluate_corpus(real, generated)
        print(f"\n=== {kind} ({args.count} vs {args.count} samples) ===")
        for metric, agg in report.generated["aggregates"].items():
            if agg["count"] == 0:
                continue
            kl = report.kl_divergence.get(metric)
            kl_text = f"  KL={kl:.6f}" if kl is not None else ""
            print(f"{metric:<32} {agg['mean']:.6f} ± {agg['std']:.6f}{kl_text}")
        print(f"{'coverage_ratio':<32} {report.generated['coverage_ratio']:.6f}")


if __name__ == "__main__":
    main()
