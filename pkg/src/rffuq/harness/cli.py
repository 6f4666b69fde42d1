"""``rffuq`` command line: generate | run | summarize | plot.

    rffuq generate --config exp.cfg --out data/ --with-truth
    rffuq run --config exp.cfg --workers 4 --out results/
    rffuq summarize results/results.csv --out results/
    rffuq plot results/summary.csv --out figures/
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .. import synthgen
from ..errors import RffUQError
from .config import ExperimentConfig, format_config, load_config
from .experiment import read_results, run_experiment, trial_data, write_results
from .summary import read_summary, summarize, write_summary
from .svg import render_boxplots

log = logging.getLogger("rffuq")


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="flat key = value experiment file")
    parser.add_argument("--seed", type=int, help="root seed (overrides the config file)")
    parser.add_argument("--out", type=Path, default=Path("."), help="output directory (default: .)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--workers", type=int, default=1, help="worker processes (default: 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rffuq", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write the synthetic dataset of one trial")
    _common(p)
    p.add_argument("--with-truth", action="store_true", help="include the true latents")
    p.add_argument("--trial", type=int, default=0)

    p = sub.add_parser("run", help="run the full experiment and write per-trial results")
    _common(p)

    p = sub.add_parser("summarize", help="results file -> boxplot summary")
    _common(p)
    p.add_argument("results", type=Path)

    p = sub.add_parser("plot", help="summary file -> SVG boxplots")
    _common(p)
    p.add_argument("summary", type=Path)
    return parser


def _config(args) -> ExperimentConfig:
    config = load_config(args.config) if args.config else ExperimentConfig()
    if args.seed is not None:
        config = config.with_seed(args.seed)
    return config


def _cmd_generate(args) -> list[Path]:
    config = _config(args)
    if not 0 <= args.trial < config.trials:
        raise RffUQError(f"--trial must lie in [0, {config.trials - 1}]")
    data = trial_data(config, args.trial)
    args.out.mkdir(parents=True, exist_ok=True)
    target = args.out / f"dataset.{args.format}"
    if args.format == "csv":
        synthgen.write_csv(data, target, with_truth=args.with_truth)
    else:
        record = {"n_train": config.n_train, "observations": data.observations.tolist()}
        if args.with_truth:
            record["latents_true"] = data.latents_true.tolist()
            record["weights"] = data.weights.tolist()
        target.write_text(json.dumps(record) + "\n")
    return [target]


def _cmd_run(args) -> list[Path]:
    config = _config(args)
    args.out.mkdir(parents=True, exist_ok=True)

    def progress(res):
        log.info("trial %d J=%d done", res.trial, res.J)

    results = run_experiment(config, workers=args.workers, progress=progress)
    (args.out / "config.txt").write_text(format_config(config))
    return [write_results(results, args.out / f"results.{args.format}", args.format)]


def _cmd_summarize(args) -> list[Path]:
    summaries = summarize(read_results(args.results))
    args.out.mkdir(parents=True, exist_ok=True)
    return [write_summary(summaries, args.out / f"summary.{args.format}", args.format)]


def _cmd_plot(args) -> list[Path]:
    return render_boxplots(read_summary(args.summary), args.out)


_COMMANDS = {"generate": _cmd_generate, "run": _cmd_run, "summarize": _cmd_summarize, "plot": _cmd_plot}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        for path in _COMMANDS[args.command](args):
            print(path)
    except (RffUQError, OSError) as exc:
        print(f"rffuq {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
