from typing import Optional, Tuple

import numpy as np
from scipy.special import expit

from aafv.core.errors import ParameterError
from aafv.models.base import Architecture, Hyperparameters, Learner
from aafv.schemas.schemas import ModelKind


def default_hidden_dim(input_dim: int) -> int:
    # half of (feature count + output count)
    return max(1, (input_dim + 1) // 2)


class MLP(Learner):
    """
    One hidden ReLU layer and a single output score, trained with
    binary cross-entropy.

    Parameter layout: [W1 (hidden x input, row-major), b1 (hidden), w2 (hidden), b2].
    """

    kind = ModelKind.MLP

    def __init__(
        self,
        input_dim: int,
        hyper: Optional[Hyperparameters] = None,
        hidden_dim: Optional[int] = None
    ):
        hidden = default_hidden_dim(input_dim) if hidden_dim is None else int(hidden_dim)
        if hidden < 1:
            raise ParameterError("hidden_dim must be >= 1")
        self.hidden_dim = hidden
        super().__init__(input_dim, hyper)

    @property
    def architecture(self) -> Architecture:
        return Architecture(self.kind, self.input_dim, self.hidden_dim)

    @property
    def n_params(self) -> int:
        return self.hidden_dim * self.input_dim + 2 * self.hidden_dim + 1

    def _unpack(self, vector: np.ndarray):
        h, c = self.hidden_dim, self.input_dim
        w1 = vector[:h * c].reshape(h, c)
        b1 = vector[h * c:h * c + h]
        w2 = vector[h * c + h:h * c + 2 * h]
        b2 = vector[-1]
        return w1, b1, w2, b2

    def decision_function(self, features: np.ndarray) -> np.ndarray:
        w1, b1, w2, b2 = self._unpack(self.params)
        hidden = np.maximum(0.0, features @ w1.T + b1)
        return hidden @ w2 + b2

    def _score_and_backprop(self, features: np.ndarray):
        w1, b1, w2, b2 = self._unpack(self.params)
        pre = features @ w1.T + b1
        hidden = np.maximum(0.0, pre)
        scores = hidden @ w2 + b2

        def backprop(dscore: np.ndarray) -> np.ndarray:
            grad = np.empty(self.n_params)
            g_w1, g_b1, g_w2, _ = self._unpack(grad)
            g_w2[:] = hidden.T @ dscore
            grad[-1] = dscore.sum()
            dpre = np.outer(dscore, w2) * (pre > 0.0)
            g_w1[:] = dpre.T @ features
            g_b1[:] = dpre.sum(axis=0)
            return grad

        return scores, backprop

    def _surrogate(self, scores: np.ndarray, labels: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        loss = np.logaddexp(0.0, scores) - labels * scores
        return loss, expit(scores) - labels

    def weight_mask(self) -> np.ndarray:
        mask = np.zeros(self.n_params, dtype=bool)
        h, c = self.hidden_dim, self.input_dim
        mask[:h * c] = True
        mask[h * c + h:h * c + 2 * h] = True
        return mask

    def initialize(self, rng: np.random.Generator) -> "MLP":
        scale = self.hyper.init_scale
        h, c = self.hidden_dim, self.input_dim
        self.params = np.concatenate([
            rng.uniform(-scale, scale, h * c),
            np.zeros(h),
            rng.uniform(-scale, scale, h),
            [0.0],
        ])
        return self
