"""
Abstention-aware local votes, server consolidation and pseudo labels.

Votes are int8 arrays: 0 = negative, 1 = positive, -1 = abstain. A vote
matrix has one row per client and one column per public sample.
"""
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
import pandas as pd

from aafv.core.errors import DimensionMismatchError, ParameterError, ReportError
from aafv.data.datasets import LabeledDataset, UnlabeledDataset


class Vote(IntEnum):
    NEGATIVE = 0
    POSITIVE = 1
    ABSTAIN = -1


VOTE_SYMBOLS = {Vote.NEGATIVE: "0", Vote.POSITIVE: "1", Vote.ABSTAIN: "*"}
_VALID = np.array([Vote.ABSTAIN, Vote.NEGATIVE, Vote.POSITIVE], dtype=np.int8)


def check_tau(tau: float) -> float:
    tau = float(tau)
    if not 0.0 < tau < 0.5:
        raise ParameterError(f"tau must lie in the open interval (0, 0.5), got {tau}")
    return tau


def as_vote_array(values, ndim: int) -> np.ndarray:
    votes = np.asarray(values)
    if votes.ndim != ndim:
        raise ParameterError(f"expected a {ndim}-D vote array, got shape {votes.shape}")
    if votes.size and not np.all(np.isin(votes, _VALID)):
        raise ParameterError("votes must be 0 (negative), 1 (positive) or -1 (abstain)")
    return votes.astype(np.int8)


def local_vote(p_tilde: np.ndarray, tau: float) -> np.ndarray:
    """
    Threshold perturbed confidences into votes.

    Negative if p <= tau, positive if p >= 1 - tau, abstain in between. The
    rule applies to the whole perturbed range, including values outside
    [0, 1].
    """
    tau = check_tau(tau)
    scores = np.asarray(p_tilde, dtype=np.float64)
    votes = np.full(scores.shape, Vote.ABSTAIN, dtype=np.int8)
    votes[scores <= tau] = Vote.NEGATIVE
    votes[scores >= 1.0 - tau] = Vote.POSITIVE
    return votes


def vote_counts(votes: np.ndarray) -> tuple:
    matrix = as_vote_array(votes, 2)
    positive = (matrix == Vote.POSITIVE).sum(axis=0)
    negative = (matrix == Vote.NEGATIVE).sum(axis=0)
    return positive, negative


def consolidate(votes: Union[np.ndarray, Sequence[np.ndarray]]) -> np.ndarray:
    """
    Strict majority over non-abstaining votes, per sample.

    Parameters:
    - votes: K x N_u vote matrix (or a sequence of K vote rows)

    Returns:
    - np.ndarray: N_u global votes; ties, including all-abstain, abstain

    Raises:
    - ParameterError: Empty matrix or invalid vote values
    """
    matrix = as_vote_array(np.asarray(votes), 2)
    if matrix.shape[0] < 1:
        raise ParameterError("consolidate needs at least one client")
    positive, negative = vote_counts(matrix)
    result = np.full(matrix.shape[1], Vote.ABSTAIN, dtype=np.int8)
    result[positive > negative] = Vote.POSITIVE
    result[negative > positive] = Vote.NEGATIVE
    return result


@dataclass(frozen=True)
class PseudoLabeledDataset:
    dataset: LabeledDataset
    source_rows: np.ndarray

    @property
    def rows(self) -> int:
        return self.dataset.rows


def build_pseudo_dataset(unlabeled: UnlabeledDataset, global_votes: np.ndarray) -> PseudoLabeledDataset:
    """Keep the public rows with a non-abstaining global vote, labelled by that vote."""
    votes = as_vote_array(global_votes, 1)
    if votes.shape[0] != unlabeled.rows:
        raise DimensionMismatchError(unlabeled.rows, votes.shape[0], "global vote count")
    keep = np.flatnonzero(votes != Vote.ABSTAIN)
    dataset = LabeledDataset(unlabeled.features[keep], votes[keep])
    return PseudoLabeledDataset(dataset, keep)


def format_votes(votes: np.ndarray) -> list:
    return [VOTE_SYMBOLS[Vote(int(v))] for v in np.asarray(votes).ravel()]


def write_votes_csv(
    path: Union[str, Path],
    votes: np.ndarray,
    global_votes: Optional[np.ndarray] = None
) -> Path:
    """
    One row per public sample, one column per client (and `global` last
    when given), symbols 0, 1 and *.
    """
    matrix = as_vote_array(votes, 2)
    frame = pd.DataFrame({f"client_{k}": format_votes(row) for k, row in enumerate(matrix)})
    if global_votes is not None:
        gv = as_vote_array(global_votes, 1)
        if gv.shape[0] != matrix.shape[1]:
            raise DimensionMismatchError(matrix.shape[1], gv.shape[0], "global vote count")
        frame["global"] = format_votes(gv)
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, lineterminator="\n", encoding="utf-8")
    except OSError as exc:
        raise ReportError(f"cannot write votes to {path}: {exc}") from exc
    return path


def read_votes_csv(path: Union[str, Path]) -> tuple:
    """Inverse of write_votes_csv: returns (vote matrix, global votes or None)."""
    symbols = {"0": Vote.NEGATIVE, "1": Vote.POSITIVE, "*": Vote.ABSTAIN}
    frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    table = frame.apply(lambda col: col.map(symbols)).to_numpy(dtype=np.int8).T
    if frame.columns[-1] == "global":
        return table[:-1], table[-1]
    return table, None
