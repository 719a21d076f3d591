from enum import Enum
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


class DatasetName(str, Enum):
    mnist = "mnist"
    emnist_letters = "emnist-letters"

    @property
    def num_classes(self) -> int:
        return 10 if self is DatasetName.mnist else 26


class Mode(str, Enum):
    train = "train"
    infer = "infer"


# ── Feature extraction ─────────────────────────────────────────────────────────

class FeatureConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    eps: float = Field(1e-8, gt=0, description="Guard added to the curvature denominator")
    sign_floor: float = Field(0.0, ge=0, description="|κ| at or below this maps to sign 0")
    pre_blur_sigma: float = Field(0.0, ge=0, description="Gaussian pre-blur; 0 disables it")
    unit_gain: bool = Field(True, description="Divide Sobel outputs by their kernel gain")


# ── Network architecture ───────────────────────────────────────────────────────

class Architecture(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    input_dim: int = Field(2352, ge=1)
    hidden_dims: Tuple[int, ...] = (2048, 1024, 512, 256)
    dropout_rates: Tuple[float, ...] = (0.5, 0.5, 0.4, 0.3)
    bn_momentum: float = Field(0.99, gt=0, lt=1)
    bn_eps: float = Field(1e-3, gt=0)

    @model_validator(mode="after")
    def _check_rates(self):
        if len(self.hidden_dims) != len(self.dropout_rates):
            raise ValueError("hidden_dims and dropout_rates must have the same length")
        if any(d < 1 for d in self.hidden_dims):
            raise ValueError("hidden layer widths must be positive")
        if any(not 0.0 <= r < 1.0 for r in self.dropout_rates):
            raise ValueError("dropout rates must lie in [0, 1)")
        return self


DEFAULT_ARCHITECTURE = Architecture()


# ── Training ───────────────────────────────────────────────────────────────────

class TrainConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    batch_size: int = Field(128, ge=2, description="Mini-batch size (BN needs at least 2)")
    lr0: float = Field(1e-3, gt=0, description="Initial Adam learning rate")
    max_epochs: int = Field(100, ge=1)
    es_patience: int = Field(10, ge=1, description="Epochs without val_accuracy gain before stopping")
    es_monitor: Literal["val_accuracy"] = "val_accuracy"
    plateau_patience: int = Field(3, ge=1, description="Epochs without val_loss gain before halving lr")
    plateau_factor: float = Field(0.5, gt=0, lt=1)
    plateau_monitor: Literal["val_loss"] = "val_loss"
    min_lr: float = Field(1e-5, gt=0)
    min_delta: float = Field(1e-4, ge=0)
    seed: int = 42
    deterministic: bool = False

    @model_validator(mode="after")
    def _check_lr(self):
        if self.min_lr > self.lr0:
            raise ValueError("min_lr must not exceed lr0")
        return self


class EpochRecord(BaseModel):
    epoch: int = Field(..., ge=1)
    train_loss: float
    train_acc: float = Field(..., ge=0, le=1)
    val_loss: float
    val_acc: float = Field(..., ge=0, le=1)
    lr: float = Field(..., gt=0)
    wall_time: float = Field(0.0, ge=0)


class SplitSummary(BaseModel):
    dataset: str
    total: int
    fit: int
    val: int
    test: int
    test_fraction: float
    val_fraction_of_train: float
    seed: int
    prng: str = "MT19937"
    allocation: str = "sklearn-approximate-mode"
    stratify_val: bool = False
    test_per_class: List[int] = []


class TrainReport(BaseModel):
    records: List[EpochRecord]
    best_epoch: int
    test_accuracy: Optional[float] = None
    config: TrainConfig
    split: Optional[SplitSummary] = None
    stopped_early: bool = False
    lr_reductions: List[int] = []

    @property
    def best_record(self) -> EpochRecord:
        return self.records[self.best_epoch - 1]


# ── Evaluation ─────────────────────────────────────────────────────────────────

class ConfusedPair(BaseModel):
    true_class: int
    predicted_class: int
    count: int


class EvalSummary(BaseModel):
    n: int
    loss: float
    top1: float
    macro_f1: float
    balanced_accuracy: float
    per_class_precision: List[float]
    per_class_recall: List[float]
    confusion: List[List[int]]
    confused_pairs: List[ConfusedPair]


# ── On-disk headers ────────────────────────────────────────────────────────────

class TensorSpec(BaseModel):
    name: str
    shape: Tuple[int, ...]


class CheckpointManifest(BaseModel):
    format_version: int = 1
    num_classes: int = Field(..., ge=2)
    architecture: Architecture
    seed: int
    tensors: List[TensorSpec]


class FeatureCacheHeader(BaseModel):
    format_version: int = 1
    dataset: str
    extractor_version: str
    rows: int = Field(..., ge=0)
    cols: int = Field(..., ge=1)
    num_classes: int = Field(..., ge=2)
    feature_config: FeatureConfig
    split: SplitSummary
