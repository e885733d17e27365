import logging
from typing import List, Optional

from aafv.core.errors import ProtocolError
from aafv.core.seeding import SeedStream
from aafv.federation.common import FederationSetup
from aafv.models.base import Learner
from aafv.privacy.laplace import clip_and_perturb

logger = logging.getLogger(__name__)


def run_local(
    setup: FederationSetup,
    epochs: int,
    streams: SeedStream,
    param_noise: bool = False
) -> List[Learner]:
    """
    Train every client in isolation on its own shard.

    When `param_noise` is set, each trained parameter vector is clipped and
    Laplace-perturbed once with the setup's budget before evaluation, as if
    the model were to be released.
    """
    if setup.k < 1:
        raise ProtocolError("run_local needs at least one client")
    learners = []
    for k, client in enumerate(setup.clients):
        client.learner.fit(client.data, epochs, streams.derive("local", "client", k, "train"))
        if param_noise:
            noisy = clip_and_perturb(
                client.learner.get_params(),
                setup.clip_bound,
                setup.epsilon,
                streams.derive("local", "client", k, "release"),
            )
            client.learner.set_params(noisy)
        learners.append(client.learner)
    logger.debug(f"Local training done for {len(learners)} clients, {epochs} epochs each")
    return learners
