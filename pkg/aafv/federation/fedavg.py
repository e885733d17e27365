import logging
from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from aafv.core.errors import ProtocolError
from aafv.core.seeding import SeedStream
from aafv.federation.common import FederationSetup, evaluate
from aafv.models.base import Learner
from aafv.privacy.laplace import clip_and_perturb
from aafv.schemas.schemas import FedAvgRound

logger = logging.getLogger(__name__)


@dataclass
class FedAvgOutcome:
    model: Learner
    traces: List[FedAvgRound] = field(default_factory=list)


def check_homogeneous(setup: FederationSetup) -> None:
    architectures = {c.learner.architecture for c in setup.clients}
    if len(architectures) > 1:
        kinds = sorted(a.kind.value for a in architectures)
        raise ProtocolError(f"FedAvg needs one shared architecture, got {kinds}")


def average_parameters(vectors: Sequence[np.ndarray]) -> np.ndarray:
    """Uniform coordinate-wise mean of equally long parameter vectors."""
    stacked = np.stack([np.asarray(v, dtype=np.float64) for v in vectors])
    return stacked.mean(axis=0)


def run_fedavg(setup: FederationSetup, streams: SeedStream, tag: str = "fedavg") -> FedAvgOutcome:
    """
    Federated averaging with Laplace-perturbed uploads.

    The first client's learner (already initialized by the caller) is the
    server's starting model and is broadcast to every client. Each round a
    client trains locally from the broadcast, clips its parameters to
    [-c, c], adds Laplace noise with sensitivity 2c and budget epsilon, and
    uploads; the server averages the uploads uniformly.

    Parameters:
    - setup: Homogeneous roster plus protocol knobs
    - streams: Source of per-client, per-round generators
    - tag: Stream label prefix, distinct per FedAvg federation in one seed

    Returns:
    - FedAvgOutcome: Final shared model and per-round test accuracy

    Raises:
    - ProtocolError: If the roster mixes architectures or has fewer than 2 clients
    """
    setup.require_federated()
    check_homogeneous(setup)
    global_model = setup.clients[0].learner.clone()
    shared = global_model.get_params()

    traces: List[FedAvgRound] = []
    for round_index in range(1, setup.e_com + 1):
        uploads = []
        for k, client in enumerate(setup.clients):
            learner = client.learner
            learner.set_params(shared)
            learner.fit(
                client.data,
                setup.local_epochs_per_round,
                streams.derive(tag, "client", k, "round", round_index, "train"),
            )
            uploads.append(
                clip_and_perturb(
                    learner.get_params(),
                    setup.clip_bound,
                    setup.epsilon,
                    streams.derive(tag, "client", k, "round", round_index, "noise"),
                )
            )
        shared = average_parameters(uploads)
        global_model.set_params(shared)
        accuracy = evaluate(global_model, setup.test)
        traces.append(FedAvgRound(round_index=round_index, accuracy=accuracy))
        logger.info(f"{tag} round {round_index}/{setup.e_com}: accuracy {accuracy:.4f}")

    for client in setup.clients:
        client.learner.set_params(shared)
    return FedAvgOutcome(global_model, traces)
