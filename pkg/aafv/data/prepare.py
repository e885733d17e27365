from typing import Tuple

import numpy as np

from aafv.data import normalize
from aafv.data.datasets import FederatedSplit
from aafv.data.normalize import NormStats, normalize_labeled, normalize_unlabeled


def normalize_split(parts: FederatedSplit) -> Tuple[FederatedSplit, NormStats]:
    """
    Fit z-score statistics once, on the pooled client shards, and apply them
    to every part. Test and public rows never contribute to the statistics.
    """
    pooled = np.concatenate([c.features for c in parts.clients], axis=0)
    stats = normalize.zscore_fit(pooled)
    normalized = FederatedSplit(
        test=normalize_labeled(parts.test, stats),
        unlabeled=normalize_unlabeled(parts.unlabeled, stats),
        clients=tuple(normalize_labeled(c, stats) for c in parts.clients),
    )
    return normalized, stats
