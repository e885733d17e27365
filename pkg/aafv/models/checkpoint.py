import json
from pathlib import Path
from typing import List, Optional, Union

from pydantic import BaseModel, ValidationError

from aafv.core.errors import DataError, ReportError
from aafv.models.base import Hyperparameters, Learner
from aafv.models.registry import create_learner
from aafv.schemas.schemas import ModelKind

CHECKPOINT_FORMAT = "aafv-checkpoint/1"


class Checkpoint(BaseModel):
    format: str = CHECKPOINT_FORMAT
    kind: ModelKind
    input_dim: int
    hidden_dim: Optional[int] = None
    learning_rate: float
    batch_size: int
    l2: float
    init_scale: float
    params: List[float]


def to_checkpoint(learner: Learner) -> Checkpoint:
    arch = learner.architecture
    return Checkpoint(
        kind=arch.kind,
        input_dim=arch.input_dim,
        hidden_dim=arch.hidden_dim,
        learning_rate=learner.hyper.learning_rate,
        batch_size=learner.hyper.batch_size,
        l2=learner.hyper.l2,
        init_scale=learner.hyper.init_scale,
        params=learner.get_params().tolist(),
    )


def from_checkpoint(checkpoint: Checkpoint) -> Learner:
    if checkpoint.format != CHECKPOINT_FORMAT:
        raise DataError(f"unsupported checkpoint format {checkpoint.format!r}")
    hyper = Hyperparameters(
        learning_rate=checkpoint.learning_rate,
        batch_size=checkpoint.batch_size,
        l2=checkpoint.l2,
        init_scale=checkpoint.init_scale,
    )
    learner = create_learner(checkpoint.kind, checkpoint.input_dim, hyper, checkpoint.hidden_dim)
    return learner.set_params(checkpoint.params)


def save_checkpoint(learner: Learner, path: Union[str, Path]) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(to_checkpoint(learner).model_dump_json(indent=2), encoding="utf-8")
    except OSError as exc:
        raise ReportError(f"cannot write checkpoint {path}: {exc}") from exc
    return path


def load_checkpoint(path: Union[str, Path]) -> Learner:
    path = Path(path)
    try:
        checkpoint = Checkpoint.model_validate_json(path.read_text(encoding="utf-8"))
    except (OSError, ValidationError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read checkpoint {path}: {exc}") from exc
    return from_checkpoint(checkpoint)
