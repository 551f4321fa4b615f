"""Command-line entry point: generate, pack, evaluate, connloss.

Exit codes: 0 success, 1 usage error, 2 data error. All numeric output uses
fixed 6-decimal formatting; no environment variables are consulted, so runs
are reproducible from the flags alone.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import dataset_io
from .connloss import ConnLossInput, component_counts_for_loss, connection_loss
from .errors import ConnvoxError, MissingGroundTruthError
from .metrics import EvalConfig, evaluate_corpus
from .shapegen import (
    DATASET_KINDS,
    fill_packed_spheres,
    gen_dataset,
    manifest_isocenters,
    pack_isocenters,
)

USAGE_EXIT = 1
DATA_EXIT = 2


class AlreadyPackedError(ConnvoxError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(USAGE_EXIT)


def _fmt(value: float) -> str:
    return f"{value:.6f}"


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="connvox", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate a synthetic dataset plus manifest")
    gen.add_argument("--kind", required=True, choices=DATASET_KINDS)
    gen.add_argument("--count", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)
    gen.add_argument("--manifest", default=None, help="default: <out>.manifest.json")

    pack = sub.add_parser("pack", help="pack grassfire subspheres into a 1-channel dataset")
    pack.add_argument("--in", dest="input", required=True)
    pack.add_argument("--out", required=True)
    pack.add_argument("--manifest", default=None)
    pack.add_argument("--rmin", type=float, default=1.0)
    pack.add_argument("--coverage", type=float, default=0.95)
    pack.add_argument("--max", dest="max_isocenters", type=int, default=20)

    ev = sub.add_parser("evaluate", help="compare a generated corpus against a real one")
    ev.add_argument("--real", required=True)
    ev.add_argument("--gen", required=True)
    ev.add_argument("--report", default=None)
    ev.add_argument("--tau-conn", type=float, default=0.90)
    ev.add_argument("--tau-conv", type=float, default=0.70)
    ev.add_argument("--bins", type=int, default=32)
    ev.add_argument("--epsilon", type=float, default=1e-10)
    ev.add_argument("--connectivity", type=int, default=26, choices=(6, 18, 26))

    cl = sub.add_parser("connloss", help="connection loss of a dataset, batched")
    cl.add_argument("--in", dest="input", required=True)
    cl.add_argument("--expected-objects", type=int, default=1)
    cl.add_argument("--manifest", default=None)
    cl.add_argument("--lambda3", type=float, default=1.0)
    cl.add_argument("--batch", type=int, default=40)
    cl.add_argument("--connectivity", type=int, default=26, choices=(6, 18, 26))
    return parser


def cmd_generate(args) -> int:
    manifest_path = args.manifest or f"{args.out}.manifest.json"
    manifest = gen_dataset(args.kind, args.count, args.seed, args.out, manifest_path)
    print(f"wrote {args.count} {args.kind} samples to {args.out} (base seed {args.seed})")
    print(f"manifest: {manifest_path}")
    causes: dict[str, int] = {}
    iso_counts = []
    for record in manifest["samples"]:
        if "stop_cause" in record:
            causes[record["stop_cause"]] = causes.get(record["stop_cause"], 0) + 1
        if "isocenters" in record:
            iso_counts.append(len(record["isocenters"]))
    if iso_counts:
        print(
            f"isocenters per sample: min {min(iso_counts)}, max {max(iso_counts)}, "
            f"mean {_fmt(sum(iso_counts) / len(iso_counts))}"
        )
    if causes:
        print("stopping causes:", ", ".join(f"{k}={v}" for k, v in sorted(causes.items())))
    return 0


def cmd_pack(args) -> int:
    grids = dataset_io.read_dataset(args.input)
    if not grids:
        raise ConnvoxError(f"{args.input} contains no samples")
    if grids[0].channels != 1:
        raise AlreadyPackedError(
            f"{args.input} already has {grids[0].channels} channels; expected a 1-channel dataset"
        )
    packed = []
    samples = []
    for i, grid in enumerate(grids):
        isocenters = pack_isocenters(
            grid,
            r_min=args.rmin,
            coverage_target=args.coverage,
            max_isocenters=args.max_isocenters,
        )
        packed.append(fill_packed_spheres(grid, isocenters))
        samples.append(
            {
                "index": i,
                "isocenters": [
                    {
                        "center": [round(p.x, 6), round(p.y, 6), round(p.z, 6)],
                        "radius": round(r, 6),
                    }
                    for p, r in zip(isocenters.centers, isocenters.radii)
                ],
                "stop_cause": isocenters.stop_cause,
            }
        )
    dataset_io.write_dataset(packed, args.out)
    manifest_path = args.manifest or f"{args.out}.manifest.json"
    manifest = {
        "format": "connvox-manifest",
        "version": 1,
        "kind": "packed",
        "count": len(packed),
        "dims": list(packed[0].dims),
        "channels": 2,
        "packing": {
            "r_min": args.rmin,
            "coverage_target": args.coverage,
            "max_isocenters": args.max_isocenters,
        },
        "samples": samples,
    }
    with open(manifest_path, "w") as fh:
        json.dump(manifest, fh, indent=1)
        fh.write("\n")
    counts = [len(s["isocenters"]) for s in samples]
    print(f"packed {len(packed)} samples to {args.out}")
    print(f"manifest: {manifest_path}")
    print(f"isocenters per sample: min {min(counts)}, max {max(counts)}")
    return 0


_TABLE_METRICS = (
    "volume_size",
    "component_count",
    "connectivity_ratio",
    "convexity_ratio",
    "omega1",
    "omega2",
    "omega3",
    "shannon_equitability",
    "subsphere_coverage",
    "connected_subspheres_fraction",
    "fd_error",
    "ratio_mae",
    "target_distance_error",
)


def cmd_evaluate(args) -> int:
    real = dataset_io.read_dataset(args.real)
    gen = dataset_io.read_dataset(args.gen)
    config = EvalConfig(
        tau_conn=args.tau_conn,
        tau_conv=args.tau_conv,
        bins=args.bins,
        epsilon=args.epsilon,
        connectivity=args.connectivity,
    )
    report = evaluate_corpus(real, gen, config)
    header = f"{'metric':<30} {'real mean±std':>24} {'gen mean±std':>24} {'KL':>12}"
    print(header)
    print("-" * len(header))
    for metric in _TABLE_METRICS:
        if metric not in report.real["aggregates"]:
            continue
        row_r = report.real["aggregates"][metric]
        row_g = report.generated["aggregates"][metric]
        kl = report.kl_divergence.get(metric)
        cell_r = (
            f"{_fmt(row_r['mean'])} ± {_fmt(row_r['std'])}" if row_r["count"] else "n/a"
        )
        cell_g = (
            f"{_fmt(row_g['mean'])} ± {_fmt(row_g['std'])}" if row_g["count"] else "n/a"
        )
        cell_kl = _fmt(kl) if kl is not None else ""
        print(f"{metric:<30} {cell_r:>24} {cell_g:>24} {cell_kl:>12}")
    print(
        f"{'coverage_ratio':<30} {_fmt(report.real['coverage_ratio']):>24} "
        f"{_fmt(report.generated['coverage_ratio']):>24}"
    )
    if args.report:
        report.write_json(args.report)
        print(f"report: {args.report}")
    return 0


def cmd_connloss(args) -> int:
    grids = dataset_io.read_dataset(args.input)
    if not grids:
        raise ConnvoxError(f"{args.input} contains no samples")
    ground_truth = [None] * len(grids)
    if args.expected_objects >= 2:
        if args.manifest is None:
            raise MissingGroundTruthError(
                "expected-objects >= 2 needs --manifest with ground-truth isocenters"
            )
        with open(args.manifest) as fh:
            manifest = json.load(fh)
        ground_truth = manifest_isocenters(manifest)
        if len(ground_truth) != len(grids) or any(g is None for g in ground_truth):
            raise MissingGroundTruthError(
                f"manifest {args.manifest} does not carry isocenters for all "
                f"{len(grids)} samples"
            )
    counts = [
        component_counts_for_loss(grid, gt, args.connectivity)
        for grid, gt in zip(grids, ground_truth)
    ]
    if args.expected_objects == 1:
        counts = [(c[0],) for c in counts]
    for start in range(0, len(counts), args.batch):
        chunk = counts[start : start + args.batch]
        loss = connection_loss(ConnLossInput(tuple(chunk), args.lambda3))
        print(f"batch {start // args.batch}: {_fmt(loss)}")
    overall = connection_loss(ConnLossInput(tuple(counts), args.lambda3))
    print(f"overall: {_fmt(overall)}")
    return 0


_COMMANDS = {
    "generate": cmd_generate,
    "pack": cmd_pack,
    "evaluate": cmd_evaluate,
    "connloss": cmd_connloss,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConnvoxError, OSError, json.JSONDecodeError) as exc:
        print(f"connvox {args.command}: {exc}", file=sys.stderr)
        return DATA_EXIT


if __name__ == "__main__":
    sys.exit(main())
