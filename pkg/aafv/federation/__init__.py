from aafv.federation.aafv import AAFVOutcome, VotingClient, VotingServer, run_aafv
from aafv.federation.common import ClientSpec, FederationSetup, evaluate
from aafv.federation.fedavg import FedAvgOutcome, average_parameters, run_fedavg
from aafv.federation.local import run_local
from aafv.federation.voting import (
    PseudoLabeledDataset,
    Vote,
    build_pseudo_dataset,
    consolidate,
    local_vote,
)

__all__ = [
    "AAFVOutcome",
    "ClientSpec",
    "FedAvgOutcome",
    "FederationSetup",
    "PseudoLabeledDataset",
    "Vote",
    "VotingClient",
    "VotingServer",
    "average_parameters",
    "build_pseudo_dataset",
    "consolidate",
    "evaluate",
    "local_vote",
    "run_aafv",
    "run_fedavg",
    "run_local",
]
