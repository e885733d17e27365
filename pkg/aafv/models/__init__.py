from aafv.models.base import Architecture, Hyperparameters, Learner, TrainLog
from aafv.models.checkpoint import load_checkpoint, save_checkpoint
from aafv.models.linear import LinearSVM, LogisticRegression, Perceptron
from aafv.models.mlp import MLP, default_hidden_dim
from aafv.models.registry import LEARNERS, build_learner, create_learner

__all__ = [
    "Architecture",
    "Hyperparameters",
    "LEARNERS",
    "Learner",
    "LinearSVM",
    "LogisticRegression",
    "MLP",
    "Perceptron",
    "TrainLog",
    "build_learner",
    "create_learner",
    "default_hidden_dim",
    "load_checkpoint",
    "save_checkpoint",
]
