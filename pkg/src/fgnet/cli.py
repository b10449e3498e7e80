"""Command-line entry point: ``fgnet <subcommand> [flags]``.

Every flag overrides the matching key of ``--config``. Exit status is 0 on
success, 2 for configuration errors, 3 for data errors and 4 when a resource
limit is hit.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import ConfigError, FgnError
from .experiment import MODES, ExperimentConfig, run_experiment

# flag dest -> config key
_FLAG_KEYS = {
    "seed": "master_seed",
    "out": "output_dir",
    "nu": "nu",
    "gamma": "gamma",
    "dim": "d",
    "rho": "rho",
    "n": "n",
    "n_grid": "n_grid",
    "replicates": "replicates",
    "edge_model": "edge_model",
    "nu0": "nu0",
    "input": "input_path",
    "aggregator": "aggregator",
    "kind": "spectrum_kind",
    "counts": "count_kinds",
    "cells_per_side": "cells_per_side",
    "allow_large": "allow_large",
    "positions": "emit_positions",
    "workers": "workers",
    "independent_fields": "common_field",
}


def _u64(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return v


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fgnet", description="Fractal Gaussian network experiments.")
    sub = parser.add_subparsers(dest="mode", required=True, metavar="{" + ",".join(MODES) + "}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with ExperimentConfig keys")
    common.add_argument("--seed", type=_u64, help="master seed (64-bit)")
    common.add_argument("--out", help="output directory")
    g = common.add_mutually_exclusive_group()
    g.add_argument("--nu", type=float, help="fractality parameter gamma^2/d")
    g.add_argument("--gamma", type=float)
    common.add_argument("--dim", type=int, help="latent dimension d")
    common.add_argument("--rho", type=float, help="density parameter")
    common.add_argument("--n", type=int, help="intensity parameter")
    common.add_argument("--n-grid", type=_int_list, help="comma-separated n values")
    common.add_argument("--replicates", type=int)
    common.add_argument("--edge-model", choices=["gaussian", "hard"])
    common.add_argument("--nu0", type=float, help="detection threshold (default 0.3)")
    common.add_argument("--aggregator", choices=["median", "mean", "trimmed_mean"])
    common.add_argument("--cells-per-side", type=int, help="GMC grid resolution override")
    common.add_argument("--positions", action="store_const", const=True, help="also write node positions")
    common.add_argument("--workers", type=int)
    common.add_argument("--allow-large", action="store_const", const=True,
                        help="run exact triangles/spectra on graphs with >= 5e5 nodes")
    helps = {
        "generate": "sample FGN graphs and write edge lists",
        "stats": "motif counts and clustering per replicate",
        "spectrum": "Laplacian or adjacency spectrum",
        "boxdim": "box-covering fractal dimension",
        "estimate": "estimate nu from sampled graphs",
        "detect": "apply the fractality detection rule",
        "sbm": "two-community block model",
        "ingest": "read an edge list, estimate and detect",
        "scaling": "fit count-vs-size slopes over an n grid",
    }
    for mode in MODES:
        p = sub.add_parser(mode, parents=[common], help=helps[mode])
        if mode in ("ingest", "estimate", "detect"):
            p.add_argument("input", nargs="?", help="edge-list file (estimate/detect sample graphs when omitted)")
        if mode == "spectrum":
            p.add_argument("--kind", choices=["laplacian", "adjacency"])
        if mode == "scaling":
            p.add_argument("--counts", type=lambda s: [x.strip() for x in s.split(",") if x.strip()],
                           help="count kinds, e.g. edges,triangles,spokes,cliques")
            p.add_argument("--independent-fields", action="store_const", const=False,
                           help="draw a fresh field for every (n, replicate)")
    return parser


def load_config_dict(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    return data


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    data: dict = {}
    if args.config:
        data = load_config_dict(args.config)
    data["mode"] = args.mode
    for dest, key in _FLAG_KEYS.items():
        value = getattr(args, dest, None)
        if value is not None:
            data[key] = value
    if getattr(args, "gamma", None) is not None:
        data["nu"] = None
    return ExperimentConfig.from_dict(data)


def _report(result) -> dict:
    out = {k: v for k, v in result.summary.items() if k != "table"}
    if result.config.output_dir:
        out["output_dir"] = result.config.output_dir
    return out


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else ConfigError.exit_code
    try:
        cfg = config_from_args(args)
        result = run_experiment(cfg)
    except FgnError as exc:
        print(f"fgnet: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (TypeError, ValueError) as exc:
        print(f"fgnet: error: {exc}", file=sys.stderr)
        return ConfigError.exit_code
    json.dump(_report(result), sys.stdout, indent=2, sort_keys=True, default=str)
    sys.stdout.write("\n")
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
