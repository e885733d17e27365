import argparse
import logging
from datetime import datetime, timezone
from pathlib import Path

from aafv.core.config import dump_config, parse_config, settings
from aafv.core.errors import ParameterError, ReportError
from aafv.core.logging import log_duration
from aafv.federation.experiment import check_source, run_experiment
from aafv.metrics.report import build_report, emit_report, format_summary_table

logger = logging.getLogger(__name__)

CONFIG_ECHO = "config.yaml"


def register(subparsers) -> None:
    parser = subparsers.add_parser("run", help="Run every configured scenario over all seeds")
    parser.add_argument("--config", required=True, help="Experiment YAML file")
    parser.add_argument("--out-dir", default=None, help="Run directory (overrides output_dir)")
    parser.add_argument("--parallel", type=int, default=None, help="Worker processes for seeds")
    parser.set_defaults(handler=cmd_run)


def cmd_run(args: argparse.Namespace) -> int:
    """
    Run an experiment and write its bundle.

    The run directory receives the resolved config, results.csv,
    summary.json, summary.txt and traces/seed-XXX-*.csv.

    A CSV source is loaded and checked against the split plan before
    anything is written.

    Returns:
    - int: 0 on success; errors propagate to the entry point
    """
    config = parse_config(args.config)
    if args.out_dir is not None:
        config = config.model_copy(update={"output_dir": args.out_dir})
    out_dir = Path(config.output_dir)
    parallel = args.parallel if args.parallel is not None else settings.PARALLEL
    if parallel < 1:
        raise ParameterError("--parallel must be >= 1")
    dataset = check_source(config)

    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / CONFIG_ECHO).write_text(dump_config(config), encoding="utf-8")
    except OSError as exc:
        raise ReportError(f"cannot create run directory {out_dir}: {exc}") from exc

    with log_duration(logger, f"run of {config.seed_count} seeds"):
        outcomes = run_experiment(config, out_dir, parallel, dataset)

    results = [r for outcome in outcomes for r in outcome.results]
    generated_at = datetime.now(timezone.utc).isoformat() if config.timestamp else None
    report = build_report(config, [o.record for o in outcomes], results, generated_at)
    emit_report(report, results, out_dir)
    print(format_summary_table(report.summaries, report.comparisons), end="")
    return 0
