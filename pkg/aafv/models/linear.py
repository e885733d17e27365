from typing import Tuple

import numpy as np
from scipy.special import expit

from aafv.models.base import Learner
from aafv.schemas.schemas import ModelKind


class LinearLearner(Learner):
    """Score s = w·x + b with parameters laid out as [w, b]."""

    @property
    def n_params(self) -> int:
        return self.input_dim + 1

    def decision_function(self, features: np.ndarray) -> np.ndarray:
        return features @ self.params[:-1] + self.params[-1]

    def _score_and_backprop(self, features: np.ndarray):
        scores = self.decision_function(features)

        def backprop(dscore: np.ndarray) -> np.ndarray:
            grad = np.empty(self.n_params)
            grad[:-1] = features.T @ dscore
            grad[-1] = dscore.sum()
            return grad

        return scores, backprop

    def weight_mask(self) -> np.ndarray:
        mask = np.ones(self.n_params, dtype=bool)
        mask[-1] = False
        return mask

    def initialize(self, rng: np.random.Generator) -> "LinearLearner":
        scale = self.hyper.init_scale
        self.params = np.concatenate([rng.uniform(-scale, scale, self.input_dim), [0.0]])
        return self


def _signed(labels: np.ndarray) -> np.ndarray:
    return 2.0 * labels - 1.0


class LogisticRegression(LinearLearner):
    kind = ModelKind.LOGISTIC

    def _surrogate(self, scores: np.ndarray, labels: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        # binary cross-entropy on the logit, overflow-free
        loss = np.logaddexp(0.0, scores) - labels * scores
        return loss, expit(scores) - labels


class Perceptron(LinearLearner):
    kind = ModelKind.PERCEPTRON

    def _surrogate(self, scores: np.ndarray, labels: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        y = _signed(labels)
        margin = y * scores
        loss = np.maximum(0.0, -margin)
        return loss, np.where(margin < 0.0, -y, 0.0)


class LinearSVM(LinearLearner):
    kind = ModelKind.SVM

    def _surrogate(self, scores: np.ndarray, labels: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        y = _signed(labels)
        margin = y * scores
        loss = np.maximum(0.0, 1.0 - margin)
        return loss, np.where(margin < 1.0, -y, 0.0)
