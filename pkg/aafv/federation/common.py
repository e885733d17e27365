from dataclasses import dataclass
from typing import List

import numpy as np

from aafv.core.errors import DimensionMismatchError, ParameterError, ProtocolError
from aafv.data.datasets import LabeledDataset, UnlabeledDataset
from aafv.models.base import Learner
from aafv.privacy.piecewise import check_epsilon


@dataclass
class ClientSpec:
    learner: Learner
    data: LabeledDataset


@dataclass
class FederationSetup:
    """
    Everything a scenario needs: K (learner, private shard) pairs, the public
    pool, the test set and the protocol knobs.
    """

    clients: List[ClientSpec]
    unlabeled: UnlabeledDataset
    test: LabeledDataset
    epsilon: float = 1.0
    tau: float = 0.3
    e_com: int = 30
    local_epochs_per_round: int = 10
    pretrain_epochs: int = 300
    clip_bound: float = 1.0

    def __post_init__(self):
        if not self.clients:
            raise ProtocolError("a federation needs at least one client")
        check_epsilon(self.epsilon)
        if self.e_com < 0 or self.local_epochs_per_round < 0 or self.pretrain_epochs < 0:
            raise ParameterError("epoch counts must be >= 0")
        dims = {c.learner.input_dim for c in self.clients}
        dims |= {c.data.cols for c in self.clients}
        dims |= {self.unlabeled.cols, self.test.cols}
        if len(dims) != 1:
            raise DimensionMismatchError(min(dims), max(dims))

    @property
    def k(self) -> int:
        return len(self.clients)

    @property
    def input_dim(self) -> int:
        return self.unlabeled.cols

    def require_federated(self) -> None:
        if self.k < 2:
            raise ProtocolError(f"federated scenarios need K >= 2 clients, got {self.k}")


def evaluate(learner: Learner, test: LabeledDataset) -> float:
    """Fraction of test rows whose predicted label matches the truth."""
    if test.rows == 0:
        raise ParameterError("evaluate needs a non-empty test set")
    predictions = learner.predict_label(test.features)
    return float(np.mean(predictions == test.labels))
