import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import ClassVar, List, Optional, Tuple

import numpy as np
from scipy.special import expit

from aafv.core.errors import DimensionMismatchError, NumericalError, ParameterError
from aafv.data.datasets import LabeledDataset, check_dim
from aafv.schemas.schemas import ModelKind

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Hyperparameters:
    learning_rate: float = 0.01
    batch_size: int = 32
    l2: float = 0.0
    init_scale: float = 0.05

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ParameterError("learning_rate must be > 0")
        if self.batch_size < 1:
            raise ParameterError("batch_size must be >= 1")
        if self.l2 < 0:
            raise ParameterError("l2 must be >= 0")


@dataclass(frozen=True)
class Architecture:
    kind: ModelKind
    input_dim: int
    hidden_dim: Optional[int] = None

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "input_dim": self.input_dim, "hidden_dim": self.hidden_dim}


@dataclass
class TrainLog:
    losses: List[float] = field(default_factory=list)

    @property
    def epochs(self) -> int:
        return len(self.losses)


class Learner(ABC):
    """
    Binary classifier over a flat parameter vector.

    Every learner turns its real-valued decision score s into a confidence
    sigmoid(s) in [0, 1]; a score of exactly 0.5 classifies as positive.
    """

    kind: ClassVar[ModelKind]

    def __init__(self, input_dim: int, hyper: Optional[Hyperparameters] = None):
        if input_dim < 1:
            raise ParameterError("input_dim must be >= 1")
        self.input_dim = int(input_dim)
        self.hyper = hyper or Hyperparameters()
        self.params = np.zeros(self.n_params)

    @property
    def architecture(self) -> Architecture:
        return Architecture(self.kind, self.input_dim)

    @property
    @abstractmethod
    def n_params(self) -> int:
        ...

    @abstractmethod
    def decision_function(self, features: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def _score_and_backprop(self, features: np.ndarray) -> Tuple[np.ndarray, "callable"]:
        """Return scores and a function mapping dLoss/dscore to dLoss/dparams."""

    @abstractmethod
    def _surrogate(self, scores: np.ndarray, labels: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Per-sample loss and its derivative with respect to the score."""

    @abstractmethod
    def weight_mask(self) -> np.ndarray:
        """Boolean mask of the parameters the L2 term applies to (biases excluded)."""

    @abstractmethod
    def initialize(self, rng: np.random.Generator) -> "Learner":
        ...

    def _check_features(self, features: np.ndarray) -> np.ndarray:
        features = np.asarray(features, dtype=np.float64)
        if features.ndim != 2:
            raise DimensionMismatchError(2, features.ndim, "feature array rank")
        check_dim(features, self.input_dim)
        return features

    def predict_proba(self, features: np.ndarray) -> np.ndarray:
        return expit(self.decision_function(self._check_features(features)))

    def predict_label(self, features: np.ndarray, cut: float = 0.5) -> np.ndarray:
        return (self.predict_proba(features) >= cut).astype(np.int8)

    def get_params(self) -> np.ndarray:
        return self.params.copy()

    def set_params(self, vector: np.ndarray) -> "Learner":
        vector = np.asarray(vector, dtype=np.float64)
        if vector.shape != (self.n_params,):
            raise DimensionMismatchError(self.n_params, vector.size, "parameter vector length")
        self.params = vector.copy()
        return self

    def loss_and_grad(self, batch: LabeledDataset) -> Tuple[float, np.ndarray]:
        """
        Mean surrogate loss over the batch plus l2/2 * ||weights||^2.

        Returns:
        - (loss, grad): grad has the same length as the parameter vector

        Raises:
        - NumericalError: If the loss or gradient is not finite
        """
        if batch.rows == 0:
            raise ParameterError("loss_and_grad needs a non-empty batch")
        features = self._check_features(batch.features)
        return self._loss_and_grad(features, batch.labels.astype(np.float64))

    def _loss_and_grad(self, features: np.ndarray, labels: np.ndarray) -> Tuple[float, np.ndarray]:
        scores, backprop = self._score_and_backprop(features)
        per_sample, dscore = self._surrogate(scores, labels)
        n = features.shape[0]
        loss = float(per_sample.mean())
        grad = backprop(dscore / n)
        if self.hyper.l2 > 0:
            mask = self.weight_mask()
            weights = self.params[mask]
            loss += 0.5 * self.hyper.l2 * float(weights @ weights)
            grad[mask] += self.hyper.l2 * weights
        if not np.isfinite(loss) or not np.all(np.isfinite(grad)):
            raise NumericalError(f"non-finite loss or gradient in {self.kind.value} learner")
        return loss, grad

    def fit(self, data: LabeledDataset, epochs: int, rng: np.random.Generator) -> TrainLog:
        """
        Mini-batch SGD, continuing from the current parameters.

        Parameters:
        - data: Training set with matching feature dimension
        - epochs: Number of passes; 0 leaves the parameters untouched
        - rng: Generator used for the per-epoch shuffle

        Returns:
        - TrainLog: Mean loss of every epoch
        """
        if epochs < 0:
            raise ParameterError("epochs must be >= 0")
        log = TrainLog()
        if epochs == 0:
            return log
        if data.rows == 0:
            raise ParameterError("cannot fit on an empty dataset")
        check_dim(data.features, self.input_dim)
        features = data.features
        labels = data.labels.astype(np.float64)
        batch_size = self.hyper.batch_size
        lr = self.hyper.learning_rate
        for epoch in range(epochs):
            order = rng.permutation(data.rows)
            total = 0.0
            for start in range(0, data.rows, batch_size):
                idx = order[start:start + batch_size]
                loss, grad = self._loss_and_grad(features[idx], labels[idx])
                self.params -= lr * grad
                total += loss * idx.size
            epoch_loss = total / data.rows
            if not np.isfinite(epoch_loss):
                raise NumericalError(f"loss diverged at epoch {epoch} for {self.kind.value} learner")
            log.losses.append(epoch_loss)
        logger.debug(
            f"Fit {self.kind.value}: {epochs} epochs, loss {log.losses[0]:.4f} -> {log.losses[-1]:.4f}"
        )
        return log

    def clone(self) -> "Learner":
        other = type(self).__new__(type(self))
        other.__dict__.update(self.__dict__)
        other.params = self.params.copy()
        return other

    def __repr__(self) -> str:
        return f"{type(self).__name__}(input_dim={self.input_dim}, n_params={self.n_params})"
