"""Command-line entry point.

Subcommands: validate, synth-scan, annotate, sketch, eval, stats, all.
Exit codes: 0 success, 2 partial failure (some models errored), 1 fatal.
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import PipelineConfig, load_config
from .errors import BrepScanError, ConfigError
from .pipeline import discover_models, parse_chunk_range, run_batch

SUBCOMMANDS = ("validate", "synth-scan", "annotate", "sketch", "eval", "stats", "all")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="brepscan",
        description="Scan, annotation, and sketch synthesis from BRep chain complexes.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("input", help="directory with *.brep.json + mesh pairs")
        p.add_argument("--config", default=None, help="TOML config path")
        p.add_argument("--seed", type=int, default=None, help="global seed override")
        p.add_argument("--chunks", default=None, help="chunk range, e.g. 0-3 or 0,2,5")
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--format", default=None, choices=["ply-binary", "ply-ascii"])
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else PipelineConfig()
        if args.workers is not None:
            cfg.workers = args.workers
        if args.format is not None:
            cfg.ply_format = args.format
        if args.out is not None:
            cfg.out_dir = args.out
        cfg.validate()
        seed = cfg.resolved_seed(args.seed)
        chunks = parse_chunk_range(args.chunks) if args.chunks else None
        models = discover_models(args.input, chunks)
        if not models:
            print(f"no models found under {args.input}", file=sys.stderr)
            return 1
        result = run_batch(args.subcommand, models, cfg, seed, cfg.out_dir)
    except (ConfigError, BrepScanError, OSError, ValueError) as exc:
        print(json.dumps({"fatal": f"{type(exc).__name__}: {exc}"}), file=sys.stderr)
        return 1

    summary = {
        "subcommand": args.subcommand,
        "seed": seed,
        "models": len(result.manifests),
        "failed": [m.model_id for m in result.manifests if m.error is not None],
        "errors": {
            m.model_id: m.error for m in result.manifests if m.error is not None
        },
        "out_dir": cfg.out_dir,
    }
    print(json.dumps(summary, indent=1, sort_keys=True))
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
