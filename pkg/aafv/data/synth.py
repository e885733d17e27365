"""
Synthetic stand-in for a large, high-dimensional clinical task.

All parts share one noisy linear labelling rule. The test set and the public
pool come from the global standard-normal distribution. Each client shard is
drawn from a shifted copy: its class balance is tilted away from the global
one (client 0 towards positives, the last client towards negatives) and its
features get an extra offset orthogonal to the labelling direction. Models
trained on one shard alone inherit that shard's tilt; the shards pooled
together reproduce the global distribution.
"""
import logging
from typing import List, Tuple

import numpy as np

from aafv.data.datasets import FederatedSplit, LabeledDataset, SealedLabels, UnlabeledDataset
from aafv.schemas.schemas import SynthSpec

logger = logging.getLogger(__name__)

DRAW_CHUNK = 256


def part_sizes(spec: SynthSpec) -> Tuple[int, int, list]:
    n_test = max(1, int(round(spec.n_samples * spec.test_fraction)))
    n_unlabeled = max(1, int(round(spec.n_samples * spec.unlabeled_fraction)))
    remaining = spec.n_samples - n_test - n_unlabeled
    base, extra = divmod(remaining, spec.n_clients)
    clients = [base + (1 if k < extra else 0) for k in range(spec.n_clients)]
    return n_test, n_unlabeled, clients


def client_positive_rates(spec: SynthSpec) -> List[float]:
    """Positive-class rate of each shard: 0.5 tilted by up to bias_strength / 2, symmetric across clients."""
    last = spec.n_clients - 1
    return [0.5 + 0.5 * spec.bias_strength * (1.0 - 2.0 * k / last) for k in range(spec.n_clients)]


def client_offsets(spec: SynthSpec, direction: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    offsets = np.zeros((spec.n_clients, spec.n_features))
    for k in range(spec.n_clients):
        u = rng.standard_normal(spec.n_features)
        u -= (u @ direction) * direction
        u /= np.linalg.norm(u)
        offsets[k] = 0.5 * spec.bias_strength * u
    return offsets


def _draw(n: int, spec: SynthSpec, direction: np.ndarray, rng: np.random.Generator):
    x = rng.standard_normal((n, spec.n_features))
    score = x @ direction + spec.label_noise * rng.standard_normal(n)
    return x, (score > 0.0).astype(np.int8)


def _draw_with_balance(n: int, positive_rate: float, spec: SynthSpec, direction: np.ndarray,
                       rng: np.random.Generator):
    """Draw from the global distribution until exactly round(n * positive_rate) positives are kept."""
    wanted = {1: int(round(n * positive_rate)), 0: 0}
    wanted[0] = n - wanted[1]
    kept = {0: [], 1: []}
    have = {0: 0, 1: 0}
    while have[0] < wanted[0] or have[1] < wanted[1]:
        x, y = _draw(DRAW_CHUNK, spec, direction, rng)
        for label in (0, 1):
            rows = x[y == label][: wanted[label] - have[label]]
            kept[label].append(rows)
            have[label] += rows.shape[0]
    features = np.concatenate(kept[1] + kept[0])
    labels = np.concatenate([np.ones(wanted[1], dtype=np.int8), np.zeros(wanted[0], dtype=np.int8)])
    order = rng.permutation(n)
    return features[order], labels[order]


def synth_biased_shards(spec: SynthSpec) -> FederatedSplit:
    """
    Generate test, public pool and biased client shards.

    Parameters:
    - spec: Sizes, bias strength, label noise and seed

    Returns:
    - FederatedSplit: Unnormalized parts; pool labels are sealed
    """
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    w = rng.standard_normal(spec.n_features)
    direction = w / np.linalg.norm(w)
    offsets = client_offsets(spec, direction, rng)
    rates = client_positive_rates(spec)
    n_test, n_unlabeled, n_clients = part_sizes(spec)

    test = LabeledDataset(*_draw(n_test, spec, direction, rng))
    pool_x, pool_y = _draw(n_unlabeled, spec, direction, rng)
    unlabeled = UnlabeledDataset(pool_x, sealed=SealedLabels(pool_y))
    clients = []
    for k, n in enumerate(n_clients):
        x, y = _draw_with_balance(n, rates[k], spec, direction, rng)
        clients.append(LabeledDataset(x + offsets[k], y))
    logger.debug(
        f"Synthesized {spec.n_samples} x {spec.n_features}: positive rate per client "
        f"{[round(float(c.labels.mean()), 3) for c in clients]}"
    )
    return FederatedSplit(test, unlabeled, tuple(clients))
