from enum import Enum
from typing import Annotated, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ModelKind(str, Enum):
    LOGISTIC = "logistic"
    PERCEPTRON = "perceptron"
    SVM = "svm"
    MLP = "mlp"


class Scenario(str, Enum):
    AAFV = "aafv"
    FEDAVG = "fedavg"
    LOCAL = "local"


SCENARIO_ORDER = [Scenario.AAFV, Scenario.FEDAVG, Scenario.LOCAL]


class FedAvgMode(str, Enum):
    PER_KIND = "per_kind"
    ROSTER = "roster"


class Mechanism(str, Enum):
    PIECEWISE = "piecewise"
    LAPLACE = "laplace"
    PASSTHROUGH = "passthrough"


# Dataset and split

class SplitPlan(StrictModel):
    test_count: int = Field(..., ge=1)
    unlabeled_count: int = Field(..., ge=1)
    client_counts: List[int] = Field(..., min_length=1)
    shuffle_seed: int = Field(0, ge=0, lt=2**64)

    @field_validator("client_counts")
    def counts_positive(cls, v: List[int]) -> List[int]:
        if any(c < 1 for c in v):
            raise ValueError("every client count must be >= 1")
        return v

    @property
    def total(self) -> int:
        return self.test_count + self.unlabeled_count + sum(self.client_counts)


class SynthSpec(StrictModel):
    n_samples: int = Field(3000, ge=10)
    n_features: int = Field(50, ge=2)
    n_clients: int = Field(3, ge=2)
    bias_strength: float = Field(0.8, ge=0.0, le=1.0)
    label_noise: float = Field(0.3, ge=0.0)
    test_fraction: float = Field(0.2, gt=0.0, lt=1.0)
    unlabeled_fraction: float = Field(0.16, gt=0.0, lt=1.0)
    seed: int = Field(7, ge=0, lt=2**64)

    @model_validator(mode="after")
    def fractions_leave_room(self) -> "SynthSpec":
        remaining = 1.0 - self.test_fraction - self.unlabeled_fraction
        if remaining <= 0:
            raise ValueError("test_fraction + unlabeled_fraction must be < 1")
        if int(self.n_samples * remaining) < self.n_clients:
            raise ValueError("not enough samples left for every client shard")
        return self


class CsvSource(StrictModel):
    source: Literal["csv"] = "csv"
    path: str
    label_column: Union[int, str]


class SynthSource(SynthSpec):
    source: Literal["synth"] = "synth"


DatasetSource = Annotated[Union[CsvSource, SynthSource], Field(discriminator="source")]


# Roster

class RosterEntry(StrictModel):
    kind: ModelKind
    learning_rate: float = Field(0.01, gt=0.0)
    batch_size: int = Field(32, ge=1)
    l2: Optional[float] = Field(None, ge=0.0)
    hidden_dim: Optional[int] = Field(None, ge=1)
    init_scale: float = Field(0.05, gt=0.0)

    @model_validator(mode="after")
    def hidden_only_for_mlp(self) -> "RosterEntry":
        if self.hidden_dim is not None and self.kind != ModelKind.MLP:
            raise ValueError("hidden_dim is only valid for kind 'mlp'")
        return self

    def resolved_l2(self) -> float:
        if self.l2 is not None:
            return self.l2
        return 1e-3 if self.kind == ModelKind.SVM else 0.0

    def architecture_key(self) -> tuple:
        return (self.kind.value, self.hidden_dim)


class ExperimentConfig(StrictModel):
    dataset: DatasetSource
    split: Optional[SplitPlan] = None
    roster: List[RosterEntry] = Field(..., min_length=1)
    scenarios: List[Scenario] = Field(default_factory=lambda: list(SCENARIO_ORDER), min_length=1)
    fedavg_mode: FedAvgMode = FedAvgMode.PER_KIND
    epsilon: float = Field(1.0, gt=0.0, allow_inf_nan=False)
    tau: float
    e_com: int = Field(30, ge=0)
    local_epochs_per_round: int = Field(10, ge=0)
    pretrain_epochs: int = Field(300, ge=0)
    local_epochs: int = Field(300, ge=0)
    clip_bound: float = Field(1.0, gt=0.0)
    local_param_noise: bool = False
    seed_count: int = Field(50, ge=1)
    master_seed: int = Field(0, ge=0, lt=2**64)
    output_dir: str = "runs/experiment"
    diagnostics: bool = True
    dump_votes: bool = False
    save_checkpoints: bool = False
    timestamp: bool = False

    @field_validator("tau")
    def tau_in_open_half(cls, v: float) -> float:
        if not 0.0 < v < 0.5:
            raise ValueError("tau must lie in the open interval (0, 0.5)")
        return v

    @field_validator("scenarios")
    def unique_scenarios(cls, v: List[Scenario]) -> List[Scenario]:
        if len(set(v)) != len(v):
            raise ValueError("scenarios must not repeat")
        return [s for s in SCENARIO_ORDER if s in v]

    @model_validator(mode="after")
    def check_consistency(self) -> "ExperimentConfig":
        problems = []
        if isinstance(self.dataset, CsvSource):
            if self.split is None:
                problems.append("split: required when dataset.source is 'csv'")
                n_clients = None
            else:
                n_clients = len(self.split.client_counts)
        else:
            if self.split is not None:
                problems.append("split: not allowed when dataset.source is 'synth'")
            n_clients = self.dataset.n_clients
        if n_clients is not None and len(self.roster) != n_clients:
            problems.append(
                f"roster: has {len(self.roster)} entries but the dataset provides {n_clients} client shards"
            )
        federated = {Scenario.AAFV, Scenario.FEDAVG} & set(self.scenarios)
        if federated and len(self.roster) < 2:
            problems.append("roster: federated scenarios need at least 2 clients")
        if (
            Scenario.FEDAVG in self.scenarios
            and self.fedavg_mode == FedAvgMode.ROSTER
            and len({e.architecture_key() for e in self.roster}) > 1
        ):
            problems.append("roster: fedavg in 'roster' mode requires a homogeneous roster")
        if problems:
            raise ValueError(" | ".join(problems))
        return self


# Protocol traces and results

class RoundTrace(BaseModel):
    round_index: int
    client_abstain: List[int]
    global_abstain: int
    pseudo_size: int
    client_accuracy: List[float]
    pseudo_label_accuracy: Optional[float] = None
    revisit_skipped: bool = False


class FedAvgRound(BaseModel):
    round_index: int
    accuracy: float


class SeedResult(BaseModel):
    seed_index: int
    seed: int
    scenario: Scenario
    model_kind: ModelKind
    client_index: int
    accuracy: float = Field(..., ge=0.0, le=1.0)
    curve: List[float] = Field(default_factory=list)


class Summary(BaseModel):
    scenario: Scenario
    model_kind: ModelKind
    mean: float
    stddev: float = Field(..., ge=0.0)
    count: int = Field(..., ge=1)
    ci95_half_width: float


class WelchResult(BaseModel):
    t_statistic: Optional[float]
    df: Optional[float]
    p_value: float = Field(..., ge=0.0, le=1.0)


class WelchComparison(BaseModel):
    model_kind: ModelKind
    baseline: Scenario
    mean_aafv: float
    mean_baseline: float
    result: WelchResult


class MechanismAccounting(BaseModel):
    epsilon_per_invocation: float
    piecewise_invocations_per_client: int
    laplace_releases_per_fedavg_client: int
    laplace_releases_per_local_model: int
    composed_budget: Optional[float] = None


class SeedRecord(BaseModel):
    seed_index: int
    seed: int


class RunReport(BaseModel):
    schema_version: str = "1.0"
    software_version: str
    config: Dict
    epsilon: float
    tau: float
    seeds: List[SeedRecord]
    accounting: MechanismAccounting
    summaries: List[Summary]
    comparisons: List[WelchComparison]
    mean_p_values: Dict[str, float]
    notes: List[str] = Field(default_factory=list)
    generated_at: Optional[str] = None


# Privacy audit

class AuditPair(BaseModel):
    t_a: float
    t_b: float
    bin_edges: List[float]
    density_a: List[float]
    density_b: List[float]
    max_log_ratio: Optional[float]
    unbounded_bins: int
    one_sided_peak: int = 0
    passed: bool


class AuditReport(BaseModel):
    schema_version: str = "1.0"
    mechanism: Mechanism
    epsilon: float
    samples: int
    bins: int
    slack: float
    bound: float
    pairs: List[AuditPair]
    passed: bool
