import logging

import numpy as np

from aafv.core.errors import DataError
from aafv.data.datasets import FederatedSplit, LabeledDataset, SealedLabels, UnlabeledDataset
from aafv.schemas.schemas import SplitPlan

logger = logging.getLogger(__name__)


def shuffled_indices(n: int, seed: int) -> np.ndarray:
    """Fisher–Yates permutation of range(n) from a PCG64 stream seeded with `seed`."""
    rng = np.random.Generator(np.random.PCG64(seed))
    order = np.arange(n, dtype=np.intp)
    for i in range(n - 1, 0, -1):
        j = int(rng.integers(0, i + 1))
        order[i], order[j] = order[j], order[i]
    return order


def split(data: LabeledDataset, plan: SplitPlan) -> FederatedSplit:
    """
    Shuffle once, then slice test | unlabeled | client_0 | ... contiguously.

    Parameters:
    - data: Full labeled dataset
    - plan: Part sizes and the shuffle seed

    Returns:
    - FederatedSplit: test set, unlabeled pool (labels sealed), client shards

    Raises:
    - DataError: If the plan asks for more rows than the dataset has
    """
    parts = split_indices(data.rows, plan)

    test = data.subset(parts[0])
    pool = data.subset(parts[1])
    unlabeled = UnlabeledDataset(pool.features, sealed=SealedLabels(pool.labels))
    clients = tuple(data.subset(idx) for idx in parts[2:])
    logger.debug(
        f"Split {data.rows} rows: test={test.rows} unlabeled={unlabeled.rows} "
        f"clients={[c.rows for c in clients]} unused={data.rows - plan.total}"
    )
    return FederatedSplit(test, unlabeled, clients)


def split_indices(n: int, plan: SplitPlan) -> list:
    """Index sets of each part, in split() order; used to check disjointness."""
    if plan.total > n:
        raise DataError(f"split plan needs {plan.total} rows but only {n} are available")
    order = shuffled_indices(n, plan.shuffle_seed)
    bounds = np.cumsum([0, plan.test_count, plan.unlabeled_count, *plan.client_counts])
    return [order[bounds[i]:bounds[i + 1]].copy() for i in range(len(bounds) - 1)]
