import copy
from pathlib import Path

import numpy as np
import pytest
import yaml

from aafv.core.seeding import SeedStream
from aafv.data.prepare import normalize_split
from aafv.data.synth import synth_biased_shards
from aafv.federation.common import ClientSpec, FederationSetup
from aafv.models.registry import build_learner
from aafv.schemas.schemas import RosterEntry, SynthSpec

SMALL_SYNTH = {
    "source": "synth",
    "n_samples": 240,
    "n_features": 4,
    "n_clients": 3,
    "bias_strength": 0.5,
    "label_noise": 0.2,
    "seed": 11,
}

SMALL_CONFIG = {
    "dataset": SMALL_SYNTH,
    "roster": [{"kind": "logistic"}, {"kind": "perceptron"}, {"kind": "svm"}],
    "scenarios": ["aafv", "fedavg", "local"],
    "epsilon": 1.0,
    "tau": 0.3,
    "e_com": 2,
    "local_epochs_per_round": 2,
    "pretrain_epochs": 5,
    "local_epochs": 5,
    "seed_count": 2,
    "master_seed": 99,
}


@pytest.fixture
def streams() -> SeedStream:
    return SeedStream(1234)


@pytest.fixture
def small_parts():
    spec = SynthSpec(**{k: v for k, v in SMALL_SYNTH.items() if k != "source"})
    parts, _ = normalize_split(synth_biased_shards(spec))
    return parts


@pytest.fixture
def config_data() -> dict:
    return copy.deepcopy(SMALL_CONFIG)


@pytest.fixture
def write_config(tmp_path):
    def _write(data: dict, name: str = "config.yaml") -> Path:
        path = tmp_path / name
        path.write_text(yaml.safe_dump(data), encoding="utf-8")
        return path

    return _write


def make_setup(parts, kinds, streams: SeedStream, **knobs) -> FederationSetup:
    """A federation over `parts` with one roster entry per client."""
    learners = [
        build_learner(RosterEntry(kind=kind), parts.test.cols, streams.derive("test", "init", k))
        for k, kind in enumerate(kinds)
    ]
    clients = [ClientSpec(learner, shard) for learner, shard in zip(learners, parts.clients)]
    return FederationSetup(clients=clients, unlabeled=parts.unlabeled, test=parts.test, **knobs)


@pytest.fixture
def setup_factory(small_parts, streams):
    def _factory(kinds=("logistic", "perceptron", "svm"), **knobs):
        knobs.setdefault("pretrain_epochs", 5)
        knobs.setdefault("local_epochs_per_round", 2)
        knobs.setdefault("e_com", 2)
        return make_setup(small_parts, kinds, streams, **knobs)

    return _factory


def random_dataset(rng: np.random.Generator, rows: int, cols: int):
    features = rng.standard_normal((rows, cols))
    labels = (features[:, 0] + 0.3 * rng.standard_normal(rows) > 0).astype(np.int8)
    return features, labels
