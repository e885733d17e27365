from aafv.data.csvio import load_csv, write_csv, write_dataset
from aafv.data.datasets import (
    FederatedSplit,
    LabeledDataset,
    SealedLabels,
    UnlabeledDataset,
    as_feature_matrix,
)
from aafv.data.normalize import NormStats, zscore_apply, zscore_fit, zscore_invert
from aafv.data.split import split, split_indices
from aafv.data.synth import synth_biased_shards

__all__ = [
    "FederatedSplit",
    "LabeledDataset",
    "NormStats",
    "SealedLabels",
    "UnlabeledDataset",
    "as_feature_matrix",
    "load_csv",
    "split",
    "split_indices",
    "synth_biased_shards",
    "write_csv",
    "write_dataset",
    "zscore_apply",
    "zscore_fit",
    "zscore_invert",
]
