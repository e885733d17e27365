"""
Deterministic seed derivation.

Every random draw in a run comes from a generator derived from the master
seed and a tuple of labels such as ("seed", 3) or ("aafv", "client", 1,
"round", 7, "noise"). Streams are keyed by label, never by call order, so
adding a scenario or reordering clients leaves every other stream unchanged.
"""
import hashlib
import json
from dataclasses import dataclass
from typing import Union

import numpy as np

from aafv.core.errors import ParameterError

Label = Union[str, int]

SEED_MASK = (1 << 64) - 1


def _digest(master: int, labels: tuple) -> int:
    if not labels:
        raise ParameterError("derive_stream needs at least one label")
    for label in labels:
        if isinstance(label, bool) or not isinstance(label, (str, int)):
            raise ParameterError(f"stream labels must be str or int, got {label!r}")
    # JSON keeps ("a", 1) and ("a", "1") apart
    payload = json.dumps([int(master) & SEED_MASK, *labels], separators=(",", ":"))
    digest = hashlib.blake2b(payload.encode("utf-8"), digest_size=16).digest()
    return int.from_bytes(digest, "little")


@dataclass(frozen=True)
class SeedStream:
    """A master seed from which labelled, independent generators are derived."""

    master: int

    def derive(self, *labels: Label) -> np.random.Generator:
        return derive_stream(self, *labels)

    def derive_int(self, *labels: Label) -> int:
        """Derive a 64-bit integer seed, e.g. for a per-seed master or a split shuffle."""
        return _digest(self.master, labels) & SEED_MASK

    def child(self, *labels: Label) -> "SeedStream":
        return SeedStream(self.derive_int(*labels))


def derive_stream(master: SeedStream, *labels: Label) -> np.random.Generator:
    """
    Build a generator from a master seed and labels.

    Parameters:
    - master: Master seed stream
    - labels: Non-empty sequence of str/int labels

    Returns:
    - np.random.Generator: PCG64 generator seeded from a BLAKE2b hash of master and labels
    """
    entropy = _digest(master.master, labels)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))
