"""
Multi-seed experiment runner.

For every seed the runner draws fresh data, builds the roster, runs each
requested scenario on its own label-keyed random streams and turns the final
models into SeedResults. Per-seed files (round traces, vote dumps,
checkpoints) carry the seed index in their names so seeds can run in
separate worker processes.
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from aafv.core.errors import ConfigValidationError, DataError
from aafv.core.logging import log_duration
from aafv.core.seeding import SeedStream
from aafv.data.csvio import load_csv
from aafv.data.datasets import FederatedSplit, LabeledDataset
from aafv.data.prepare import normalize_split
from aafv.data.split import split
from aafv.data.synth import synth_biased_shards
from aafv.federation.aafv import run_aafv
from aafv.federation.common import ClientSpec, FederationSetup, evaluate
from aafv.federation.fedavg import run_fedavg
from aafv.federation.local import run_local
from aafv.federation.voting import Vote, write_votes_csv
from aafv.metrics.report import write_fedavg_traces, write_round_traces
from aafv.models.checkpoint import save_checkpoint
from aafv.models.registry import build_learner
from aafv.schemas.schemas import (
    CsvSource,
    ExperimentConfig,
    FedAvgMode,
    FedAvgRound,
    RosterEntry,
    RoundTrace,
    Scenario,
    SeedRecord,
    SeedResult,
)

logger = logging.getLogger(__name__)


@dataclass
class SeedOutcome:
    record: SeedRecord
    results: List[SeedResult] = field(default_factory=list)
    aafv_traces: List[RoundTrace] = field(default_factory=list)
    fedavg_traces: Dict[str, List[FedAvgRound]] = field(default_factory=dict)


def seed_stream(config: ExperimentConfig, seed_index: int) -> Tuple[int, SeedStream]:
    """Run seed i is derived from the master seed and ("seed", i), never master + i."""
    streams = SeedStream(config.master_seed).child("seed", seed_index)
    return streams.master, streams


def load_source(config: ExperimentConfig) -> Optional[LabeledDataset]:
    if isinstance(config.dataset, CsvSource):
        return load_csv(config.dataset.path, config.dataset.label_column)
    return None


def check_source(config: ExperimentConfig) -> Optional[LabeledDataset]:
    """
    Load a CSV source and check the split plan against it.

    Raises:
    - ConfigValidationError: Missing file, unknown label column, or a plan
      needing more rows than the file has. Malformed rows keep their DataError.
    """
    if not isinstance(config.dataset, CsvSource):
        return None
    try:
        dataset = load_source(config)
    except DataError as exc:
        if exc.row is not None:
            raise
        raise ConfigValidationError([f"dataset: {exc.detail}"], config.dataset.path) from exc
    if config.split.total > dataset.rows:
        raise ConfigValidationError(
            [f"split: plan needs {config.split.total} rows but the CSV has {dataset.rows}"],
            config.dataset.path,
        )
    return dataset


def prepare_seed_data(
    config: ExperimentConfig,
    streams: SeedStream,
    dataset: Optional[LabeledDataset] = None
) -> FederatedSplit:
    """Split (CSV) or synthesize the parts for one seed, then normalize them."""
    if isinstance(config.dataset, CsvSource):
        if dataset is None:
            dataset = load_source(config)
        plan = config.split.model_copy(
            update={"shuffle_seed": streams.derive_int("data", "split", config.split.shuffle_seed)}
        )
        parts = split(dataset, plan)
    else:
        spec = config.dataset.model_copy(update={"seed": streams.derive_int("data", config.dataset.seed)})
        parts = synth_biased_shards(spec)
    normalized, _ = normalize_split(parts)
    return normalized


def pseudo_label_accuracy(global_votes: np.ndarray, truth: np.ndarray) -> Optional[float]:
    """Agreement of non-abstaining global votes with the sealed ground truth."""
    keep = global_votes != Vote.ABSTAIN
    if not keep.any():
        return None
    return float(np.mean(global_votes[keep] == truth[keep]))


def _setup(
    config: ExperimentConfig,
    learners: Sequence,
    parts: FederatedSplit
) -> FederationSetup:
    return FederationSetup(
        clients=[ClientSpec(learner, shard) for learner, shard in zip(learners, parts.clients)],
        unlabeled=parts.unlabeled,
        test=parts.test,
        epsilon=config.epsilon,
        tau=config.tau,
        e_com=config.e_com,
        local_epochs_per_round=config.local_epochs_per_round,
        pretrain_epochs=config.pretrain_epochs,
        clip_bound=config.clip_bound,
    )


def fedavg_federations(config: ExperimentConfig) -> List[Tuple[str, List[RosterEntry]]]:
    """
    (stream tag, roster) of every FedAvg federation of a seed.

    `per_kind` runs one homogeneous federation per distinct roster
    architecture, each client running the first roster entry of that
    architecture; `roster` federates the (homogeneous) roster as written.
    """
    k = len(config.roster)
    if config.fedavg_mode == FedAvgMode.ROSTER:
        return [("fedavg", list(config.roster))]
    federations: Dict[tuple, Tuple[str, List[RosterEntry]]] = {}
    for entry in config.roster:
        key = entry.architecture_key()
        if key not in federations:
            tag = f"fedavg-{entry.kind.value}"
            if entry.hidden_dim is not None:
                tag = f"{tag}-{entry.hidden_dim}"
            federations[key] = (tag, [entry] * k)
    return list(federations.values())


class SeedRunner:
    """Runs every requested scenario for one seed."""

    def __init__(
        self,
        config: ExperimentConfig,
        seed_index: int,
        out_dir: Optional[Path] = None,
        dataset: Optional[LabeledDataset] = None
    ):
        self.config = config
        self.seed_index = seed_index
        self.out_dir = Path(out_dir) if out_dir is not None else None
        self.run_seed, self.streams = seed_stream(config, seed_index)
        self.parts = prepare_seed_data(config, self.streams, dataset)
        self.input_dim = self.parts.test.cols
        self.outcome = SeedOutcome(SeedRecord(seed_index=seed_index, seed=self.run_seed))

    def _file(self, folder: str, suffix: str) -> Optional[Path]:
        if self.out_dir is None:
            return None
        return self.out_dir / folder / f"seed-{self.seed_index:03d}-{suffix}"

    def _result(self, scenario: Scenario, entry: RosterEntry, k: int, accuracy: float, curve=()) -> None:
        self.outcome.results.append(
            SeedResult(
                seed_index=self.seed_index,
                seed=self.run_seed,
                scenario=scenario,
                model_kind=entry.kind,
                client_index=k,
                accuracy=accuracy,
                curve=list(curve),
            )
        )

    def _checkpoint(self, learner, suffix: str) -> None:
        path = self._file("checkpoints", f"{suffix}.json")
        if self.config.save_checkpoints and path is not None:
            save_checkpoint(learner, path)

    def run_aafv(self) -> None:
        roster = self.config.roster
        learners = [
            build_learner(entry, self.input_dim, self.streams.derive("aafv", "client", k, "init"))
            for k, entry in enumerate(roster)
        ]
        setup = _setup(self.config, learners, self.parts)

        auditor = None
        if self.config.diagnostics and self.parts.unlabeled.sealed is not None:
            truth = self.parts.unlabeled.sealed.reveal()

            def auditor(global_votes: np.ndarray) -> Optional[float]:
                return pseudo_label_accuracy(global_votes, truth)

        sink = None
        if self.config.dump_votes and self.out_dir is not None:
            def sink(round_index: int, votes: np.ndarray, global_votes: np.ndarray) -> None:
                write_votes_csv(self._file("votes", f"round-{round_index:03d}.csv"), votes, global_votes)

        outcome = run_aafv(setup, self.streams, label_auditor=auditor, vote_sink=sink)
        for k, (entry, learner) in enumerate(zip(roster, outcome.learners)):
            curve = [t.client_accuracy[k] for t in outcome.traces]
            self._result(Scenario.AAFV, entry, k, evaluate(learner, self.parts.test), curve)
            self._checkpoint(learner, f"aafv-client-{k}")
        self.outcome.aafv_traces = outcome.traces
        path = self._file("traces", "aafv.csv")
        if path is not None:
            write_round_traces(path, outcome.traces)

    def run_fedavg(self) -> None:
        for tag, roster in fedavg_federations(self.config):
            learners = [build_learner(entry, self.input_dim) for entry in roster]
            # one server-side initialization, broadcast in the first round
            learners[0].initialize(self.streams.derive(tag, "init"))
            setup = _setup(self.config, learners, self.parts)
            outcome = run_fedavg(setup, self.streams, tag=tag)
            accuracy = evaluate(outcome.model, self.parts.test)
            # the shared model is reported once per federation, as client 0
            self._result(Scenario.FEDAVG, roster[0], 0, accuracy, [t.accuracy for t in outcome.traces])
            self._checkpoint(outcome.model, tag)
            self.outcome.fedavg_traces[tag] = outcome.traces
            path = self._file("traces", f"{tag}.csv")
            if path is not None:
                write_fedavg_traces(path, outcome.traces)

    def run_local(self) -> None:
        roster = self.config.roster
        learners = [
            build_learner(entry, self.input_dim, self.streams.derive("local", "client", k, "init"))
            for k, entry in enumerate(roster)
        ]
        setup = _setup(self.config, learners, self.parts)
        trained = run_local(setup, self.config.local_epochs, self.streams, self.config.local_param_noise)
        for k, (entry, learner) in enumerate(zip(roster, trained)):
            self._result(Scenario.LOCAL, entry, k, evaluate(learner, self.parts.test))
            self._checkpoint(learner, f"local-client-{k}")

    def run(self) -> SeedOutcome:
        handlers = {
            Scenario.AAFV: self.run_aafv,
            Scenario.FEDAVG: self.run_fedavg,
            Scenario.LOCAL: self.run_local,
        }
        for scenario in self.config.scenarios:
            with log_duration(logger, f"seed {self.seed_index} {scenario.value}"):
                handlers[scenario]()
        return self.outcome


def run_seed(
    config: ExperimentConfig,
    seed_index: int,
    out_dir: Optional[Path] = None,
    dataset: Optional[LabeledDataset] = None
) -> SeedOutcome:
    """
    Run every requested scenario for one seed.

    Parameters:
    - config: Validated experiment configuration
    - seed_index: Index in 0..seed_count
    - out_dir: Run directory for per-seed traces, vote dumps and checkpoints
    - dataset: Pre-loaded CSV dataset, loaded from the config when omitted

    Returns:
    - SeedOutcome: Seed record, final results and round traces
    """
    return SeedRunner(config, seed_index, out_dir, dataset).run()


def _seed_job(args: tuple) -> SeedOutcome:
    return run_seed(*args)


def run_experiment(
    config: ExperimentConfig,
    out_dir: Optional[Path] = None,
    parallel: int = 1,
    dataset: Optional[LabeledDataset] = None
) -> List[SeedOutcome]:
    """Run all seeds, in worker processes when `parallel` > 1; outcomes keep seed order."""
    if dataset is None:
        dataset = load_source(config)
    jobs = [(config, i, out_dir, dataset) for i in range(config.seed_count)]
    if parallel <= 1 or config.seed_count == 1:
        return [_seed_job(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=parallel) as executor:
        return list(executor.map(_seed_job, jobs))
