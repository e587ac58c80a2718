"""
Subcommands of the feature-leveling CLI.

    gen-ixor  generate the IXOR toy table
    train     train a proposed or baseline net from a JSON config
    eval      print a metric of a checkpoint as JSON
    prune     write a pruned checkpoint and print its architecture string
    report    write the per-level interpretability report
    heatmap   export a weight matrix as PGM or CSV

Machine-readable results go to stdout; progress goes to the log (stderr).
"""

import argparse
import json
import logging
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

from config import settings
from config.schemas import RunConfig
from data.dataset import Dataset, read_table, split, write_table
from data.ixor import gen_ixor
from data.registry import load_run_datasets, resolve_table_path
from network import checkpoint
from network.model import PrunedNet
from network.pruning import effective_glm_width, prune
from network.propagation import forward_eval
from network.training import train
from reports.heatmap import export_heatmap, select_matrix
from reports.levels import full_report
from reports.metrics import METRIC_KINDS, default_metric, metric
from storage.files import atomic_write_text
from utils.errors import ArgumentError, UsageError

logger = logging.getLogger(__name__)

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


class CliArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that raises UsageError instead of exiting."""

    def error(self, message):
        raise UsageError(message)


def _emit(payload: Dict[str, Any]):
    print(json.dumps(payload, indent=2))


# Config handling

_TRAIN_OVERRIDES = {
    "seed": "seed",
    "lam": "lambda",
    "iterations": "iterations",
    "lr": "lr",
    "batch_size": "batch_size",
    "warmup": "lambda_warmup_iters",
    "eval_every": "eval_every",
    "gate_init": "gate_init",
    "matmul": "matmul",
}


def load_run_config(path: str, args: Optional[argparse.Namespace] = None) -> RunConfig:
    """
    Read a JSON run config and apply command-line overrides.

    Raises:
        UsageError: unreadable file, unknown or missing key, invalid value
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except FileNotFoundError:
        raise UsageError(f"config file not found: {path}") from None
    except json.JSONDecodeError as e:
        raise UsageError(f"config file {path} is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise UsageError(f"config file {path} must hold a JSON object")

    if args is not None:
        train_section = data.setdefault("train", {})
        for attr, key in _TRAIN_OVERRIDES.items():
            value = getattr(args, attr, None)
            if value is not None:
                train_section[key] = value
        if getattr(args, "mode", None):
            data["mode"] = args.mode
        if getattr(args, "out_dir", None):
            data.setdefault("output", {})["dir"] = args.out_dir
    return RunConfig.from_dict(data)


def _embedded_config(net) -> Optional[RunConfig]:
    if net.config and "dataset" in net.config:
        return RunConfig.from_dict(net.config)
    return None


def _eval_dataset(args: argparse.Namespace, net) -> Dataset:
    """Rows selected by --data, --config, or the config stored in the checkpoint."""
    if args.data:
        return read_table(resolve_table_path(args.data), net.task)
    config = load_run_config(args.config) if args.config else _embedded_config(net)
    if config is None:
        raise UsageError("no data given: pass --data or --config (the checkpoint holds no dataset config)")
    train_set, test_set = load_run_datasets(config)
    return train_set if args.split == "train" else test_set


def _metric_kind(args: argparse.Namespace, net) -> str:
    if args.metric:
        return args.metric
    config = _embedded_config(net)
    return config.metric_kind if config else default_metric(net.task)


# Handlers

def cmd_gen_ixor(args: argparse.Namespace) -> int:
    """Write an IXOR table, or a 4:1 train/test pair with --split."""
    dataset = gen_ixor(args.n, args.seed)
    out = Path(args.out)
    if not args.split:
        write_table(dataset, out)
        _emit({"rows": len(dataset), "path": str(out)})
        return 0
    train_set, test_set = split(dataset, args.seed)
    stem = out.with_suffix("")
    train_path = stem.parent / f"{stem.name}-train.csv"
    test_path = stem.parent / f"{stem.name}-test.csv"
    write_table(train_set, train_path)
    write_table(test_set, test_path)
    _emit({"train": str(train_path), "test": str(test_path), "rows": [len(train_set), len(test_set)]})
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    """Train from a config; writes the checkpoint and the history CSV."""
    config = load_run_config(args.config, args)
    train_set, test_set = load_run_datasets(config)
    net, history = train(
        config.train,
        train_set,
        config.hidden,
        task=config.task,
        out_dim=config.out_dim,
        eval_set=test_set,
        metric_kind=config.metric_kind,
        mode=config.mode,
    )
    net.config = config.effective()
    checkpoint_path = checkpoint.save(net, config.output.checkpoint_path())
    history_path = config.output.history_path()
    history.write_csv(history_path)

    final_metric = metric(config.metric_kind, forward_eval(net, test_set.features), test_set.targets())
    _emit({
        "checkpoint": str(checkpoint_path),
        "history": str(history_path),
        "metric": {"kind": config.metric_kind, "value": final_metric},
        "open_gates": net.open_gate_counts(),
    })
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    net = checkpoint.load(args.model)
    dataset = _eval_dataset(args, net)
    kind = _metric_kind(args, net)
    value = metric(kind, forward_eval(net, dataset.features), dataset.targets())
    _emit({"kind": kind, "value": value, "rows": len(dataset)})
    return 0


def cmd_prune(args: argparse.Namespace) -> int:
    """Write the pruned checkpoint; print the architecture string."""
    net = checkpoint.load(args.model)
    if isinstance(net, PrunedNet):
        raise UsageError(f"{args.model} is already pruned ({net.architecture})")
    pruned, architecture = prune(net)
    checkpoint.save(pruned, args.out)
    logger.info(f"Effective GLM width {effective_glm_width(pruned)}")
    print(architecture)
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    net = checkpoint.load(args.model)
    dataset = _eval_dataset(args, net)
    report = full_report(net, dataset, _metric_kind(args, net))
    text = report.model_dump_json(indent=2)
    if args.out:
        atomic_write_text(args.out, text + "\n")
        logger.info(f"Wrote report to {args.out}")
    else:
        print(text)
    return 0


def cmd_heatmap(args: argparse.Namespace) -> int:
    net = checkpoint.load(args.model)
    try:
        matrix = select_matrix(net, args.layer)
    except ArgumentError as e:
        raise UsageError(str(e)) from e
    export_heatmap(matrix, args.out, args.format)
    _emit({"path": args.out, "rows": int(matrix.shape[0]), "cols": int(matrix.shape[1])})
    return 0


# Parser

def _add_data_args(parser: argparse.ArgumentParser):
    parser.add_argument("--data", help="CSV table written by gen-ixor (name or path)")
    parser.add_argument("--config", help="run config whose dataset to evaluate on")
    parser.add_argument("--split", choices=("train", "test"), default="test")
    parser.add_argument("--metric", choices=METRIC_KINDS)


def build_parser() -> CliArgumentParser:
    parser = CliArgumentParser(
        prog="feature-leveling",
        description="Train, prune and inspect feature-leveling networks",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python app.py gen-ixor --n 10000 --seed 7 --out ixor.csv --split
  python app.py train --config config/experiments/ixor.json --seed 7
  python app.py report --model runs/ixor/model.json --data ixor-test
        """,
    )
    parser.add_argument(
        "--log-level",
        type=str.upper,
        choices=LOG_LEVELS,
        default=settings.DEFAULT_LOG_LEVEL,
        help="Logging verbosity (default: INFO)",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=CliArgumentParser)

    p = sub.add_parser("gen-ixor", help="generate the IXOR toy dataset")
    p.add_argument("--n", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--split", action="store_true", help="write <out>-train.csv and <out>-test.csv (4:1)")
    p.set_defaults(handler=cmd_gen_ixor)

    p = sub.add_parser("train", help="train a network from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--iterations", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--warmup", type=int, help="lambda warm-up iterations")
    p.add_argument("--eval-every", type=int)
    p.add_argument("--gate-init", type=float)
    p.add_argument("--matmul", choices=("fixed", "blas"))
    p.add_argument("--mode", choices=("proposed", "baseline"))
    p.add_argument("--out-dir")
    p.set_defaults(handler=cmd_train)

    p = sub.add_parser("eval", help="print a metric of a checkpoint")
    p.add_argument("--model", required=True)
    _add_data_args(p)
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("prune", help="write a pruned checkpoint")
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_prune)

    p = sub.add_parser("report", help="per-level interpretability report")
    p.add_argument("--model", required=True)
    p.add_argument("--out", help="report path (default: stdout)")
    _add_data_args(p)
    p.set_defaults(handler=cmd_report)

    p = sub.add_parser("heatmap", help="export a weight matrix")
    p.add_argument("--model", required=True)
    p.add_argument("--layer", default="head", help="'head' or a 1-based hidden layer number")
    p.add_argument("--format", choices=("pgm", "csv"), default="pgm")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_heatmap)

    return parser


def parse_args(argv: List[str]) -> argparse.Namespace:
    return build_parser().parse_args(argv)


def dispatch(args: argparse.Namespace) -> int:
    handler: Callable[[argparse.Namespace], int] = args.handler
    return handler(args)
