from dataclasses import dataclass

import numpy as np

from aafv.core.errors import DataError, DimensionMismatchError
from aafv.data.datasets import LabeledDataset, UnlabeledDataset, as_feature_matrix


@dataclass(frozen=True)
class NormStats:
    mean: np.ndarray
    std: np.ndarray

    @property
    def cols(self) -> int:
        return self.mean.shape[0]

    @classmethod
    def identity(cls, cols: int) -> "NormStats":
        return cls(np.zeros(cols), np.ones(cols))


def zscore_fit(data: np.ndarray) -> NormStats:
    """
    Per-column mean and population standard deviation.

    A zero-variance column keeps stddev 1, so it centers to all zeros and the
    feature count is preserved.
    """
    matrix = as_feature_matrix(data)
    if matrix.shape[0] < 2:
        raise DataError("zscore_fit needs at least 2 rows")
    mean = matrix.mean(axis=0)
    std = matrix.std(axis=0, ddof=0)
    std = np.where(std > 0.0, std, 1.0)
    return NormStats(mean, std)


def zscore_apply(data: np.ndarray, stats: NormStats) -> np.ndarray:
    matrix = as_feature_matrix(data, allow_empty=True)
    if matrix.shape[1] != stats.cols:
        raise DimensionMismatchError(stats.cols, matrix.shape[1])
    return (matrix - stats.mean) / stats.std


def zscore_invert(data: np.ndarray, stats: NormStats) -> np.ndarray:
    matrix = as_feature_matrix(data, allow_empty=True)
    if matrix.shape[1] != stats.cols:
        raise DimensionMismatchError(stats.cols, matrix.shape[1])
    return matrix * stats.std + stats.mean


def normalize_labeled(data: LabeledDataset, stats: NormStats) -> LabeledDataset:
    return LabeledDataset(zscore_apply(data.features, stats), data.labels)


def normalize_unlabeled(data: UnlabeledDataset, stats: NormStats) -> UnlabeledDataset:
    return UnlabeledDataset(zscore_apply(data.features, stats), data.sealed)
