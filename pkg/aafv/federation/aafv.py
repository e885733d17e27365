"""
Abstention-aware federated voting.

Clients pre-train on their private shards, then for every communication
round: predict on the public pool, perturb the confidences with the
piecewise mechanism, vote with abstention, upload only the votes; the
server consolidates by strict majority and returns global votes; each
client retrains on its shard plus the pseudo-labelled public rows.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from aafv.core.errors import ProtocolError
from aafv.core.seeding import SeedStream
from aafv.data.datasets import LabeledDataset, UnlabeledDataset
from aafv.federation.common import FederationSetup, evaluate
from aafv.federation.voting import (
    PseudoLabeledDataset,
    Vote,
    as_vote_array,
    build_pseudo_dataset,
    check_tau,
    consolidate,
    local_vote,
)
from aafv.models.base import Learner, TrainLog
from aafv.privacy.piecewise import PiecewiseParams, perturb_predictions, piecewise_params
from aafv.schemas.schemas import RoundTrace

logger = logging.getLogger(__name__)

LabelAuditor = Callable[[np.ndarray], float]
VoteSink = Callable[[int, np.ndarray, np.ndarray], None]


class VotingClient:
    """A participant: owns its model and private shard, exposes only votes."""

    def __init__(self, index: int, learner: Learner, shard: LabeledDataset):
        self.index = index
        self._learner = learner
        self._shard = shard

    @property
    def learner(self) -> Learner:
        return self._learner

    def pretrain(self, epochs: int, rng: np.random.Generator) -> TrainLog:
        return self._learner.fit(self._shard, epochs, rng)

    def cast_votes(
        self,
        public: UnlabeledDataset,
        params: PiecewiseParams,
        tau: float,
        rng: np.random.Generator
    ) -> np.ndarray:
        confidences = self._learner.predict_proba(public.features)
        perturbed = perturb_predictions(confidences, params, rng)
        return local_vote(perturbed, tau)

    def revisit(self, pseudo: PseudoLabeledDataset, epochs: int, rng: np.random.Generator) -> TrainLog:
        # pseudo-labelled rows weigh the same as private rows
        pool = LabeledDataset.concat([pseudo.dataset, self._shard])
        return self._learner.fit(pool, epochs, rng)


class VotingServer:
    """Counts uploaded votes; never sees confidences, features or models."""

    def consolidate(self, uploads: Sequence[np.ndarray]) -> np.ndarray:
        rows = [as_vote_array(u, 1) for u in uploads]
        if len({r.shape[0] for r in rows}) > 1:
            raise ProtocolError("clients voted on different numbers of public samples")
        return consolidate(np.stack(rows))


@dataclass
class AAFVOutcome:
    learners: List[Learner]
    traces: List[RoundTrace] = field(default_factory=list)


def run_aafv(
    setup: FederationSetup,
    streams: SeedStream,
    server: Optional[VotingServer] = None,
    label_auditor: Optional[LabelAuditor] = None,
    vote_sink: Optional[VoteSink] = None
) -> AAFVOutcome:
    """
    Run pre-training and e_com voting rounds.

    Parameters:
    - setup: Clients, public pool, test set and protocol knobs
    - streams: Source of per-client, per-round generators
    - server: Consolidation endpoint (a plain VotingServer by default)
    - label_auditor: Optional scorer of global votes, for diagnostics only
    - vote_sink: Optional callback receiving (round, vote matrix, global votes)

    Returns:
    - AAFVOutcome: The K improved learners and one RoundTrace per round
    """
    setup.require_federated()
    tau = check_tau(setup.tau)
    params = piecewise_params(setup.epsilon)
    server = server or VotingServer()
    clients = [VotingClient(k, spec.learner, spec.data) for k, spec in enumerate(setup.clients)]
    n_public = setup.unlabeled.rows

    for client in clients:
        client.pretrain(setup.pretrain_epochs, streams.derive("aafv", "client", client.index, "pretrain"))

    traces: List[RoundTrace] = []
    for round_index in range(1, setup.e_com + 1):
        uploads = [
            client.cast_votes(
                setup.unlabeled,
                params,
                tau,
                streams.derive("aafv", "client", client.index, "round", round_index, "noise"),
            )
            for client in clients
        ]
        global_votes = server.consolidate(uploads)
        if vote_sink is not None:
            vote_sink(round_index, np.stack(uploads), global_votes)

        pseudo = build_pseudo_dataset(setup.unlabeled, global_votes)
        skipped = pseudo.rows == 0
        if skipped:
            logger.warning(f"Round {round_index}: every global vote abstained, skipping revisit")
        else:
            for client in clients:
                client.revisit(
                    pseudo,
                    setup.local_epochs_per_round,
                    streams.derive("aafv", "client", client.index, "round", round_index, "revisit"),
                )

        global_abstain = int(np.sum(global_votes == Vote.ABSTAIN))
        trace = RoundTrace(
            round_index=round_index,
            client_abstain=[int(np.sum(u == Vote.ABSTAIN)) for u in uploads],
            global_abstain=global_abstain,
            pseudo_size=pseudo.rows,
            client_accuracy=[evaluate(c.learner, setup.test) for c in clients],
            pseudo_label_accuracy=label_auditor(global_votes) if label_auditor else None,
            revisit_skipped=skipped,
        )
        assert trace.pseudo_size + trace.global_abstain == n_public
        traces.append(trace)
        logger.info(
            f"Round {round_index}/{setup.e_com}: global abstain {global_abstain}/{n_public}, "
            f"pseudo size {pseudo.rows}, accuracy {[round(a, 4) for a in trace.client_accuracy]}"
        )

    return AAFVOutcome([c.learner for c in clients], traces)
