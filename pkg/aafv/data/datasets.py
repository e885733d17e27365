from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from aafv.core.errors import DataError, DimensionMismatchError


def as_feature_matrix(values, *, allow_empty: bool = False) -> np.ndarray:
    """
    Coerce values into a finite, row-major float64 N×C matrix.

    Raises:
    - DataError: If the array is not 2-D, is empty, or holds NaN/Inf
    """
    matrix = np.array(values, dtype=np.float64, order="C")
    if matrix.ndim != 2:
        raise DataError(f"feature matrix must be 2-D, got shape {matrix.shape}")
    if matrix.shape[1] < 1 or (matrix.shape[0] < 1 and not allow_empty):
        raise DataError(f"feature matrix needs rows >= 1 and cols >= 1, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise DataError("feature matrix contains NaN or Inf")
    return matrix


def as_binary_labels(values) -> np.ndarray:
    labels = np.asarray(values)
    if labels.ndim != 1:
        raise DataError(f"labels must be 1-D, got shape {labels.shape}")
    if labels.size and not np.all(np.isin(labels, (0, 1))):
        raise DataError("labels must take only the values 0 or 1")
    return labels.astype(np.int8)


def check_dim(features: np.ndarray, expected: int) -> None:
    if features.shape[1] != expected:
        raise DimensionMismatchError(expected, features.shape[1])


@dataclass(frozen=True)
class LabeledDataset:
    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        features = as_feature_matrix(self.features, allow_empty=True)
        labels = as_binary_labels(self.labels)
        if labels.shape[0] != features.shape[0]:
            raise DataError(
                f"labels length {labels.shape[0]} does not match {features.shape[0]} rows"
            )
        features.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)

    @property
    def rows(self) -> int:
        return self.features.shape[0]

    @property
    def cols(self) -> int:
        return self.features.shape[1]

    def __len__(self) -> int:
        return self.rows

    def subset(self, index: Sequence[int]) -> "LabeledDataset":
        index = np.asarray(index, dtype=np.intp)
        return LabeledDataset(self.features[index], self.labels[index])

    @classmethod
    def concat(cls, parts: Sequence["LabeledDataset"]) -> "LabeledDataset":
        parts = [p for p in parts if p.rows > 0] or list(parts[:1])
        cols = {p.cols for p in parts}
        if len(cols) > 1:
            raise DimensionMismatchError(min(cols), max(cols))
        return cls(
            np.concatenate([p.features for p in parts], axis=0),
            np.concatenate([p.labels for p in parts], axis=0),
        )


class SealedLabels:
    """
    Ground truth of the public pool, kept for diagnostics only.

    Protocol code receives an UnlabeledDataset and must never call reveal();
    the experiment runner uses it to score pseudo labels after the fact.
    """

    __slots__ = ("_labels",)

    def __init__(self, labels: np.ndarray):
        self._labels = as_binary_labels(labels)

    def __len__(self) -> int:
        return self._labels.shape[0]

    def __repr__(self) -> str:
        return f"SealedLabels(n={len(self)})"

    def reveal(self) -> np.ndarray:
        return self._labels.copy()


@dataclass(frozen=True)
class UnlabeledDataset:
    features: np.ndarray
    sealed: Optional[SealedLabels] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        features = as_feature_matrix(self.features)
        features.setflags(write=False)
        object.__setattr__(self, "features", features)
        if self.sealed is not None and len(self.sealed) != features.shape[0]:
            raise DataError("sealed labels do not match the unlabeled rows")

    @property
    def rows(self) -> int:
        return self.features.shape[0]

    @property
    def cols(self) -> int:
        return self.features.shape[1]

    def __len__(self) -> int:
        return self.rows


@dataclass(frozen=True)
class FederatedSplit:
    test: LabeledDataset
    unlabeled: UnlabeledDataset
    clients: tuple

    def __iter__(self):
        # allows `test, unlabeled, clients = split(...)`
        return iter((self.test, self.unlabeled, list(self.clients)))
