"""
Run report assembly and emission.

A run directory holds `summary.json` (the versioned RunReport), an aligned
plain-text `summary.txt`, and `results.csv` with one row per seed, scenario
and client. Round traces are written separately by the run command.
"""
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd
from pydantic import ValidationError

from aafv import __version__
from aafv.core.errors import ReportError
from aafv.data.synth import part_sizes
from aafv.metrics.stats import group_results, summarize, welch_t_test
from aafv.schemas.schemas import (
    CsvSource,
    ExperimentConfig,
    FedAvgRound,
    MechanismAccounting,
    RoundTrace,
    RunReport,
    Scenario,
    SeedRecord,
    SeedResult,
    Summary,
    WelchComparison,
)

logger = logging.getLogger(__name__)

REPORT_FILE = "summary.json"
TABLE_FILE = "summary.txt"
RESULTS_FILE = "results.csv"

P_MEAN_NOTE = (
    "mean_p_values averages the per-kind Welch p values across model kinds. "
    "The average is descriptive only and is not a valid combined test."
)
FEW_SEEDS_NOTE = "Welch comparisons need at least 2 seeds per group and were skipped."


def public_pool_size(config: ExperimentConfig) -> int:
    if isinstance(config.dataset, CsvSource):
        return config.split.unlabeled_count
    return part_sizes(config.dataset)[1]


def build_accounting(config: ExperimentConfig) -> MechanismAccounting:
    """Per-seed mechanism invocation counts; each invocation spends epsilon on its own."""
    scenarios = set(config.scenarios)
    aafv = Scenario.AAFV in scenarios
    fedavg = Scenario.FEDAVG in scenarios
    local_noise = Scenario.LOCAL in scenarios and config.local_param_noise
    return MechanismAccounting(
        epsilon_per_invocation=config.epsilon,
        piecewise_invocations_per_client=config.e_com * public_pool_size(config) if aafv else 0,
        laplace_releases_per_fedavg_client=config.e_com if fedavg else 0,
        laplace_releases_per_local_model=1 if local_noise else 0,
    )


def compare_scenarios(results: Sequence[SeedResult]) -> List[WelchComparison]:
    """
    Welch tests of AAFV against every baseline, per model kind.

    Accuracies are averaged over the clients of one seed first, so each
    sample holds one value per seed.
    """
    per_seed: Dict[tuple, Dict[int, List[float]]] = {}
    for r in results:
        per_seed.setdefault((r.scenario, r.model_kind), {}).setdefault(r.seed_index, []).append(r.accuracy)
    samples = {key: [float(np.mean(v)) for _, v in sorted(seeds.items())] for key, seeds in per_seed.items()}

    comparisons = []
    for scenario, kind in group_results(results):
        if scenario == Scenario.AAFV:
            continue
        aafv = samples.get((Scenario.AAFV, kind))
        baseline = samples[(scenario, kind)]
        if aafv is None or len(aafv) < 2 or len(baseline) < 2:
            continue
        comparisons.append(
            WelchComparison(
                model_kind=kind,
                baseline=scenario,
                mean_aafv=float(np.mean(aafv)),
                mean_baseline=float(np.mean(baseline)),
                result=welch_t_test(aafv, baseline),
            )
        )
    return comparisons


def mean_p_values(comparisons: Sequence[WelchComparison]) -> Dict[str, float]:
    grouped: Dict[str, List[float]] = {}
    for c in comparisons:
        grouped.setdefault(c.baseline.value, []).append(c.result.p_value)
    return {baseline: float(np.mean(values)) for baseline, values in grouped.items()}


def build_report(
    config: ExperimentConfig,
    seeds: Sequence[SeedRecord],
    results: Sequence[SeedResult],
    generated_at: Optional[str] = None
) -> RunReport:
    """
    Assemble the RunReport for a finished run.

    Parameters:
    - config: Resolved experiment configuration, echoed in full
    - seeds: Seed index and derived run seed of every seed
    - results: Final accuracies of every seed, scenario and client
    - generated_at: Optional timestamp; left out for byte-identical reruns

    Returns:
    - RunReport: Summaries, Welch comparisons, accounting and notes
    """
    comparisons = compare_scenarios(results)
    notes = []
    if comparisons:
        notes.append(P_MEAN_NOTE)
    elif config.seed_count < 2 and Scenario.AAFV in config.scenarios and len(config.scenarios) > 1:
        notes.append(FEW_SEEDS_NOTE)
    return RunReport(
        software_version=__version__,
        config=config.model_dump(mode="json"),
        epsilon=config.epsilon,
        tau=config.tau,
        seeds=list(seeds),
        accounting=build_accounting(config),
        summaries=summarize(results),
        comparisons=comparisons,
        mean_p_values=mean_p_values(comparisons),
        notes=notes,
        generated_at=generated_at,
    )


def format_summary_table(summaries: Sequence[Summary], comparisons: Sequence[WelchComparison] = ()) -> str:
    """Aligned plain-text table, one row per scenario x model kind."""
    header = ["scenario", "model", "mean", "stddev", "n", "ci95"]
    rows = [
        [
            s.scenario.value,
            s.model_kind.value,
            f"{s.mean:.4f}",
            f"{s.stddev:.4f}",
            str(s.count),
            f"±{s.ci95_half_width:.4f}",
        ]
        for s in summaries
    ]
    widths = [max(len(r[i]) for r in [header, *rows]) for i in range(len(header))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in [header, *rows]]
    if comparisons:
        lines.append("")
        for c in comparisons:
            lines.append(
                f"aafv vs {c.baseline.value} ({c.model_kind.value}): "
                f"{c.mean_aafv:.4f} vs {c.mean_baseline:.4f}, p = {c.result.p_value:.4g}"
            )
    return "\n".join(lines) + "\n"


def results_frame(results: Sequence[SeedResult]) -> pd.DataFrame:
    columns = ["seed_index", "seed", "scenario", "model_kind", "client_index", "accuracy"]
    return pd.DataFrame(
        [
            [r.seed_index, str(r.seed), r.scenario.value, r.model_kind.value, r.client_index, r.accuracy]
            for r in results
        ],
        columns=columns,
    )


def _write_frame(frame: pd.DataFrame, path: Path) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n", encoding="utf-8")
    except OSError as exc:
        raise ReportError(f"cannot write {path}: {exc}") from exc
    return path


def write_round_traces(path: Union[str, Path], traces: Sequence[RoundTrace]) -> Path:
    """One row per AAFV round: abstain counts, pseudo size and per-client accuracy."""
    records = []
    for t in traces:
        record = {
            "round": t.round_index,
            "global_abstain": t.global_abstain,
            "pseudo_size": t.pseudo_size,
            "pseudo_label_accuracy": t.pseudo_label_accuracy,
            "revisit_skipped": t.revisit_skipped,
        }
        for k, (abstain, acc) in enumerate(zip(t.client_abstain, t.client_accuracy)):
            record[f"client_{k}_abstain"] = abstain
            record[f"client_{k}_accuracy"] = acc
        records.append(record)
    return _write_frame(pd.DataFrame.from_records(records), Path(path))


def write_fedavg_traces(path: Union[str, Path], traces: Sequence[FedAvgRound]) -> Path:
    frame = pd.DataFrame({"round": [t.round_index for t in traces], "accuracy": [t.accuracy for t in traces]})
    return _write_frame(frame, Path(path))


def emit_report(
    report: RunReport,
    results: Sequence[SeedResult],
    destination: Union[str, Path]
) -> Dict[str, Path]:
    """
    Write summary.json, summary.txt and results.csv into `destination`.

    Raises:
    - ReportError: If the directory or a file cannot be written
    """
    destination = Path(destination)
    paths = {
        "json": destination / REPORT_FILE,
        "table": destination / TABLE_FILE,
        "results": destination / RESULTS_FILE,
    }
    try:
        destination.mkdir(parents=True, exist_ok=True)
        paths["json"].write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
        paths["table"].write_text(format_summary_table(report.summaries, report.comparisons), encoding="utf-8")
    except OSError as exc:
        raise ReportError(f"cannot write report to {destination}: {exc}") from exc
    _write_frame(results_frame(results), paths["results"])
    logger.info(f"Report written to {destination}")
    return paths


def parse_report(path: Union[str, Path]) -> RunReport:
    path = Path(path)
    try:
        report = RunReport.model_validate_json(path.read_text(encoding="utf-8"))
    except (OSError, ValidationError) as exc:
        raise ReportError(f"cannot read report {path}: {exc}") from exc
    expected = RunReport.model_fields["schema_version"].default
    if report.schema_version != expected:
        raise ReportError(f"{path} has schema_version {report.schema_version}, expected {expected}")
    return report
