from typing import Union

import numpy as np

from aafv.core.errors import ParameterError
from aafv.privacy.piecewise import check_epsilon

ArrayLike = Union[float, np.ndarray]

# smallest argument passed to log so u = 0 cannot produce an infinite draw
_TINY = np.finfo(np.float64).tiny


def laplace_noise(scale: float, shape, rng: np.random.Generator) -> np.ndarray:
    """Zero-mean Laplace noise by inverse CDF, one uniform draw per value."""
    u = rng.random(shape) - 0.5
    return -scale * np.sign(u) * np.log(np.maximum(1.0 - 2.0 * np.abs(u), _TINY))


def laplace_perturb(
    value: ArrayLike,
    sensitivity: float,
    epsilon: float,
    rng: np.random.Generator
) -> ArrayLike:
    """
    Add Laplace(sensitivity / epsilon) noise to a scalar or array.

    Parameters:
    - value: Value(s) to release
    - sensitivity: L1 sensitivity of one coordinate, > 0
    - epsilon: Privacy budget, > 0

    Returns:
    - Same shape as `value`
    """
    if not sensitivity > 0.0 or not np.isfinite(sensitivity):
        raise ParameterError(f"sensitivity must be positive, got {sensitivity}")
    epsilon = check_epsilon(epsilon)
    arr = np.asarray(value, dtype=np.float64)
    noisy = arr + laplace_noise(sensitivity / epsilon, arr.shape, rng)
    if arr.ndim == 0:
        return float(noisy)
    return noisy


def clip_and_perturb(
    params: np.ndarray,
    clip_bound: float,
    epsilon: float,
    rng: np.random.Generator
) -> np.ndarray:
    """
    Clip every coordinate to [-c, c] and release it with sensitivity 2c.

    The budget is spent once per released vector; no composition across
    rounds is tracked.
    """
    if not clip_bound > 0.0:
        raise ParameterError(f"clip bound must be positive, got {clip_bound}")
    clipped = np.clip(np.asarray(params, dtype=np.float64), -clip_bound, clip_bound)
    return laplace_perturb(clipped, 2.0 * clip_bound, epsilon, rng)
