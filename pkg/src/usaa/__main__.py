#!/usr/bin/env python
# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.


from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Sequence

from tabulate import tabulate

from . import __version__
from .augment import Policy, random_policy
from .config import Config, dump_config, load_config
from .dataset import bar_bundle, load_manifest, write_bundle
from .encoding import ArchSpaceReading, CellEncoding, arch_space_size, aug_space_size
from .exceptions import ConfigError, EncodingError, ParameterError, USAAError
from .nn import NetworkSpec
from .pipeline import (
    build_report,
    evaluate_split,
    final_train,
    grid_search,
    load_model,
    report_digest,
    run_trial,
    save_model,
)
from .pipeline.grid import GridResult
from .stats import bias_report
from .streams import Streams
from .typing import TaskType

logger = logging.getLogger("usaa")

ENCODING_KEYS = ("policy", "normal", "reduce", "layers")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="usaa",
        description="Joint evolutionary search of augmentation policies and cell architectures.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", type=Path, help="Configuration file (section.key = value lines)")
    parser.add_argument("--seed", type=int, help="Seed of every random stream (overrides the config)")
    parser.add_argument("--out", type=Path, default=Path(), help="Output directory")
    parser.add_argument(
        "--set",
        metavar="KEY=VALUE",
        action="append",
        default=[],
        help="Override one configuration key, e.g. search.k=5",
    )
    parser.add_argument(
        "--log-level",
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
    )

    subparsers = parser.add_subparsers(dest="command", required=True, metavar="command")

    search = subparsers.add_parser("search", help="Grid of searches, then final training of the winner")
    search.add_argument("manifest", type=Path)
    search.add_argument("--la", type=int, help="Run a single trial with this augmentation length")
    search.add_argument("--ln", type=int, help="Run a single trial with this network depth")
    search.add_argument("--budget", type=int, help="Maximum number of trials")
    search.add_argument("--final-epochs", type=int, help="Epochs of the final training")

    train = subparsers.add_parser("train", help="Final training of saved encodings")
    train.add_argument("encodings", type=Path, help="encodings.json written by search")
    train.add_argument("manifest", type=Path)
    train.add_argument("--epochs", type=int)
    train.add_argument(
        "--random-policy",
        action="store_true",
        help="Replace the searched policy by K random sub-policies",
    )

    evaluate = subparsers.add_parser("evaluate", help="Score a saved model on one split")
    evaluate.add_argument("model", type=Path)
    evaluate.add_argument("manifest", type=Path)
    evaluate.add_argument("--split", default="test", choices=["train", "val", "test"])

    bias = subparsers.add_parser("bias-report", help="Train/val sampling bias of several bundles")
    bias.add_argument("manifests", type=Path, nargs="+")
    bias.add_argument("--csv", action="store_true", help="Print CSV instead of a table")

    size = subparsers.add_parser("space-size", help="Size of the augmentation policy space")
    size.add_argument("--la", type=int, required=True)
    size.add_argument("--k", type=int, required=True)
    size.add_argument(
        "--arch",
        choices=[r.value for r in ArchSpaceReading],
        help="Also print the architecture space size under this reading",
    )

    convert = subparsers.add_parser("convert", help="CSV or raw dumps to an IDX bundle in --out")
    convert.add_argument("source", type=Path)
    convert.add_argument("--format", choices=["csv", "raw"], default="csv")
    convert.add_argument("--name", required=True)
    convert.add_argument("--task", required=True, choices=[t.value for t in TaskType])
    convert.add_argument("--classes", type=int, required=True)
    convert.add_argument("--channels", type=int, default=1, choices=[1, 3])

    toy = subparsers.add_parser("make-toy", help="Write the horizontal-bar toy bundle to --out")
    toy.add_argument("--n-train", type=int, default=200)
    toy.add_argument("--n-val", type=int, default=100)
    toy.add_argument("--n-test", type=int, default=100)

    return parser


def _config(opts: argparse.Namespace) -> Config:
    config = load_config(opts.config)
    overrides: dict[str, Any] = {}
    for item in opts.set:
        key, sep, value = item.partition("=")
        if not sep:
            msg = f"--set expects KEY=VALUE, got {item!r}"
            raise ConfigError(msg)
        overrides[key.strip()] = value.strip()
    if opts.seed is not None:
        overrides["seed"] = opts.seed
    return config.override(overrides) if overrides else config


def _write_json(path: Path, value: Any) -> None:
    path.write_text(json.dumps(value, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _search(opts: argparse.Namespace, config: Config) -> None:
    bundle = load_manifest(opts.manifest)
    streams = Streams(config.seed)
    opts.out.mkdir(parents=True, exist_ok=True)
    if (opts.la is None) != (opts.ln is None):
        msg = "--la and --ln must be given together"
        raise ParameterError(msg)
    if opts.la is not None:
        trial = run_trial(
            config, bundle, opts.la, opts.ln, streams.child(0), workdir=opts.out
        )
        grid = GridResult([trial], 0)
    else:
        grid = grid_search(config, bundle, streams, opts.budget, workdir=opts.out)
    print(tabulate(grid.table(), headers=["Trial", "L_a", "L_n", "Val AUC", "Val ACC", "Best"]))

    searched = grid.best.search
    _write_json(opts.out / "encodings.json", searched)
    spec = _network(searched, config, bundle.num_classes, bundle.channels)
    model, final = final_train(
        spec,
        Policy.from_list(searched["policy"]),
        bundle,
        streams.child(len(grid.trials)),
        config,
        opts.final_epochs,
    )
    save_model(model, opts.out / "model.usaa")
    report = build_report(config, grid, final)
    _write_json(opts.out / "report.json", report)
    _print_final(final.to_dict())
    print(f"Report digest: {report_digest(report)}")


def _network(searched: dict[str, Any], config: Config, classes: int, channels: int) -> NetworkSpec:
    return NetworkSpec(
        CellEncoding.from_dict(searched["normal"]),
        CellEncoding.from_dict(searched["reduce"]),
        searched["layers"],
        config.network.c_init,
        classes,
        channels,
    )


def _load_encodings(path: Path) -> dict[str, Any]:
    "Read an encodings.json written by search, rejecting anything malformed."
    try:
        searched = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as err:
        msg = f"{path} is not valid JSON ({err})"
        raise EncodingError(msg) from err
    if not isinstance(searched, dict):
        msg = f"{path} must hold a JSON object, got {type(searched).__name__}"
        raise EncodingError(msg)
    missing = [key for key in ENCODING_KEYS if key not in searched]
    if missing:
        msg = f"{path} is missing {', '.join(missing)}"
        raise EncodingError(msg)
    try:
        Policy.from_list(searched["policy"])
        CellEncoding.from_dict(searched["normal"])
        CellEncoding.from_dict(searched["reduce"])
        int(searched["layers"])
    except USAAError:
        raise
    except (KeyError, TypeError, ValueError) as err:
        msg = f"{path} holds a malformed encoding ({type(err).__name__}: {err})"
        raise EncodingError(msg) from err
    return searched


def _print_final(final: dict[str, Any]) -> None:
    rows = [["val", final["val"]["auc"], final["val"]["acc"]]]
    if final["test"] is not None:
        rows.append(["test", final["test"]["auc"], final["test"]["acc"]])
    print(tabulate(rows, headers=["Split", "AUC", "ACC"], floatfmt=".4f"))


def _train(opts: argparse.Namespace, config: Config) -> None:
    searched = _load_encodings(opts.encodings)
    bundle = load_manifest(opts.manifest)
    streams = Streams(config.seed)
    if opts.random_policy:
        policy = random_policy(config.search.k, config.search.aug_length, streams["evolution"])
        searched = {**searched, "policy": policy.to_list()}
    else:
        policy = Policy.from_list(searched["policy"])
    spec = _network(searched, config, bundle.num_classes, bundle.channels)
    model, final = final_train(spec, policy, bundle, streams, config, opts.epochs)
    opts.out.mkdir(parents=True, exist_ok=True)
    save_model(model, opts.out / "model.usaa")
    _write_json(opts.out / "report.json", build_report(config, None, final, searched))
    _print_final(final.to_dict())


def _evaluate(opts: argparse.Namespace) -> None:
    model = load_model(opts.model)
    bundle = load_manifest(opts.manifest)
    scores = evaluate_split(model, getattr(bundle, opts.split))
    print(
        tabulate(
            [[opts.split, scores.auc, scores.acc, scores.loss]],
            headers=["Split", "AUC", "ACC", "Loss"],
            floatfmt=".4f",
        )
    )


def _convert(opts: argparse.Namespace) -> None:
    from .dataset import convert

    reader = convert.from_csv if opts.format == "csv" else convert.from_raw
    bundle = reader(opts.source, opts.name, opts.task, opts.classes, opts.channels)
    path = write_bundle(bundle, opts.out)
    print(bundle.describe())
    print(f"Written {path}")


def run(opts: argparse.Namespace) -> None:
    config = _config(opts)
    logger.debug("Configuration:\n%s", dump_config(config))

    if opts.command == "search":
        _search(opts, config)
    elif opts.command == "train":
        _train(opts, config)
    elif opts.command == "evaluate":
        _evaluate(opts)
    elif opts.command == "bias-report":
        report = bias_report([load_manifest(m) for m in opts.manifests])
        print(report.to_csv() if opts.csv else report.table())
    elif opts.command == "space-size":
        print(aug_space_size(opts.la, opts.k))
        if opts.arch is not None:
            print(arch_space_size(opts.arch))
    elif opts.command == "convert":
        _convert(opts)
    elif opts.command == "make-toy":
        bundle = bar_bundle(
            Streams(config.seed)["data-shuffle"], opts.n_train, opts.n_val, opts.n_test
        )
        print(f"Written {write_bundle(bundle, opts.out)}")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    opts = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, opts.log_level),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        run(opts)
    except (USAAError, OSError) as err:
        print(f"usaa: error: {type(err).__name__}: {err}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
