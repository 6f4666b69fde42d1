"""Experiment orchestration: configs, the trial runner, summaries, SVG boxplots, CLI."""

from .config import CONFIG_KEYS, ExperimentConfig, format_config, load_config, parse_config
from .experiment import (
    RESULTS_HEADER,
    TrialResult,
    evaluate_test_set,
    format_results,
    read_results,
    results_rows,
    run_experiment,
    run_unit,
    trial_data,
    trial_dataset,
    write_results,
)
from .summary import SUMMARY_HEADER, BoxplotSummary, box_stats, format_summary, read_summary, summarize, write_summary
from .svg import boxplot_svg, render_boxplots

__all__ = [
    "CONFIG_KEYS",
    "ExperimentConfig",
    "format_config",
    "load_config",
    "parse_config",
    "RESULTS_HEADER",
    "TrialResult",
    "evaluate_test_set",
    "format_results",
    "read_results",
    "results_rows",
    "run_experiment",
    "run_unit",
    "trial_data",
    "trial_dataset",
    "write_results",
    "SUMMARY_HEADER",
    "BoxplotSummary",
    "box_stats",
    "format_summary",
    "read_summary",
    "summarize",
    "write_summary",
    "boxplot_svg",
    "render_boxplots",
]
