from typing import Dict, Optional, Type

import numpy as np

from aafv.core.errors import ParameterError
from aafv.models.base import Hyperparameters, Learner
from aafv.models.linear import LinearSVM, LogisticRegression, Perceptron
from aafv.models.mlp import MLP
from aafv.schemas.schemas import ModelKind, RosterEntry

LEARNERS: Dict[ModelKind, Type[Learner]] = {
    ModelKind.LOGISTIC: LogisticRegression,
    ModelKind.PERCEPTRON: Perceptron,
    ModelKind.SVM: LinearSVM,
    ModelKind.MLP: MLP,
}


def create_learner(
    kind: ModelKind,
    input_dim: int,
    hyper: Optional[Hyperparameters] = None,
    hidden_dim: Optional[int] = None
) -> Learner:
    kind = ModelKind(kind)
    if kind == ModelKind.MLP:
        return MLP(input_dim, hyper, hidden_dim=hidden_dim)
    if hidden_dim is not None:
        raise ParameterError(f"hidden_dim is not valid for {kind.value}")
    return LEARNERS[kind](input_dim, hyper)


def build_learner(
    entry: RosterEntry,
    input_dim: int,
    rng: Optional[np.random.Generator] = None
) -> Learner:
    """
    Instantiate a roster entry, initialized from `rng` when given.

    Parameters:
    - entry: Model kind and hyperparameters from the config roster
    - input_dim: Feature count C
    - rng: Generator for the uniform weight initialization

    Returns:
    - Learner: Ready for fit()
    """
    hyper = Hyperparameters(
        learning_rate=entry.learning_rate,
        batch_size=entry.batch_size,
        l2=entry.resolved_l2(),
        init_scale=entry.init_scale,
    )
    learner = create_learner(entry.kind, input_dim, hyper, entry.hidden_dim)
    if rng is not None:
        learner.initialize(rng)
    return learner
