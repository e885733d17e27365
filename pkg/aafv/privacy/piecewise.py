"""
Piecewise mechanism for bounded reals under epsilon-LDP.

An input t in [-1, 1] is released as a value in [-T, T]. With probability
e^{eps/2} / (e^{eps/2} + 1) the output is uniform on the high-density band
[l(t), r(t)]; otherwise it is uniform on the two tails, so the density is
rho inside the band and rho / e^eps outside.
"""
import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from aafv.core.errors import ParameterError

ArrayLike = Union[float, np.ndarray]


def check_epsilon(epsilon: float) -> float:
    epsilon = float(epsilon)
    if not math.isfinite(epsilon) or epsilon <= 0.0:
        raise ParameterError(f"privacy budget epsilon must be positive and finite, got {epsilon}")
    return epsilon


@dataclass(frozen=True)
class PiecewiseParams:
    epsilon: float
    T: float
    rho: float

    @property
    def band_probability(self) -> float:
        half = math.exp(self.epsilon / 2.0)
        return half / (half + 1.0)

    @property
    def tail_density(self) -> float:
        return self.rho / math.exp(self.epsilon)

    def total_mass(self) -> float:
        return self.rho * (self.T - 1.0) + self.tail_density * (self.T + 1.0)


def piecewise_params(epsilon: float) -> PiecewiseParams:
    epsilon = check_epsilon(epsilon)
    try:
        half = math.exp(epsilon / 2.0)
        full = math.exp(epsilon)
    except OverflowError as exc:
        raise ParameterError(f"epsilon {epsilon} is too large to represent the mechanism") from exc
    T = (half + 1.0) / (half - 1.0)
    rho = (full - half) / (2.0 * half + 2.0)
    return PiecewiseParams(epsilon=epsilon, T=T, rho=rho)


def _check_unit(t: ArrayLike) -> np.ndarray:
    arr = np.asarray(t, dtype=np.float64)
    if not np.all(np.isfinite(arr)) or np.any(np.abs(arr) > 1.0):
        raise ParameterError("piecewise mechanism inputs must lie in [-1, 1]")
    return arr


def interval(t: ArrayLike, params: PiecewiseParams) -> Tuple[ArrayLike, ArrayLike]:
    """
    High-density band for input t.

    Returns:
    - (l, r): l = (T+1)/2 * t - (T-1)/2 and r = l + T - 1
    """
    arr = _check_unit(t)
    left = (params.T + 1.0) / 2.0 * arr - (params.T - 1.0) / 2.0
    right = left + params.T - 1.0
    if arr.ndim == 0:
        return float(left), float(right)
    return left, right


def piecewise_perturb(t: ArrayLike, params: PiecewiseParams, rng: np.random.Generator) -> ArrayLike:
    """
    Release t (scalar or array) through the piecewise mechanism.

    Tail samples are drawn uniformly over the union [-T, l) U (r, T]: one
    uniform position on a segment of length T + 1 is mapped onto the left
    piece or the right piece in proportion to their lengths.
    """
    arr = _check_unit(t)
    left, right = interval(arr, params)
    left = np.asarray(left)
    right = np.asarray(right)
    alpha = rng.random(arr.shape)
    u = rng.random(arr.shape)
    in_band = left + u * (params.T - 1.0)
    pos = u * (params.T + 1.0)
    left_len = left + params.T
    in_tail = np.where(pos < left_len, -params.T + pos, right + (pos - left_len))
    out = np.where(alpha < params.band_probability, in_band, in_tail)
    out = np.clip(out, -params.T, params.T)
    if arr.ndim == 0:
        return float(out)
    return out


def to_mechanism_scale(p: np.ndarray) -> np.ndarray:
    return 2.0 * p - 1.0


def to_prediction_scale(t: np.ndarray) -> np.ndarray:
    return (t + 1.0) / 2.0


def perturb_predictions(p: np.ndarray, params: PiecewiseParams, rng: np.random.Generator) -> np.ndarray:
    """
    Perturb confidence scores in [0, 1].

    Scores are mapped to t = 2p - 1, released, and mapped back, so the
    result lies in [(1 - T)/2, (1 + T)/2] on the prediction scale.
    """
    scores = np.asarray(p, dtype=np.float64)
    if scores.size == 0:
        return np.zeros(scores.shape)
    if not np.all(np.isfinite(scores)) or np.any((scores < 0.0) | (scores > 1.0)):
        raise ParameterError("confidence scores must lie in [0, 1]")
    t = np.clip(to_mechanism_scale(scores), -1.0, 1.0)
    return to_prediction_scale(np.asarray(piecewise_perturb(t, params, rng)))
