import copy
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import ShapeMismatch
from .schemas import Architecture


@dataclass
class DenseLayer:
    W: np.ndarray  # (out, in)
    b: np.ndarray  # (out,)
    dW: Optional[np.ndarray] = None
    db: Optional[np.ndarray] = None

    @property
    def in_dim(self) -> int:
        return self.W.shape[1]

    @property
    def out_dim(self) -> int:
        return self.W.shape[0]


@dataclass
class BatchNormLayer:
    gamma: np.ndarray
    beta: np.ndarray
    running_mean: np.ndarray
    running_var: np.ndarray
    momentum: float = 0.99
    eps: float = 1e-3
    dgamma: Optional[np.ndarray] = None
    dbeta: Optional[np.ndarray] = None


@dataclass(frozen=True)
class DropoutSpec:
    rate: float = 0.0

    @property
    def keep(self) -> float:
        return 1.0 - self.rate


@dataclass
class HiddenBlock:
    """FC → BN → ReLU → Dropout."""

    dense: DenseLayer
    bn: BatchNormLayer
    dropout: DropoutSpec


@dataclass
class MlpModel:
    hidden: list[HiddenBlock]
    output: DenseLayer
    num_classes: int
    architecture: Architecture
    seed: int = 0

    @property
    def input_dim(self) -> int:
        return self.hidden[0].dense.in_dim if self.hidden else self.output.in_dim

    @property
    def dtype(self) -> np.dtype:
        return self.output.W.dtype

    # ── Named tensors ─────────────────────────────────────────────────────────

    def parameters(self) -> dict[str, np.ndarray]:
        """Trainable tensors in checkpoint order; values are the live arrays."""
        params: dict[str, np.ndarray] = {}
        for i, block in enumerate(self.hidden):
            params[f"hidden.{i}.W"] = block.dense.W
            params[f"hidden.{i}.b"] = block.dense.b
            params[f"hidden.{i}.gamma"] = block.bn.gamma
            params[f"hidden.{i}.beta"] = block.bn.beta
        params["output.W"] = self.output.W
        params["output.b"] = self.output.b
        return params

    def gradients(self) -> dict[str, np.ndarray]:
        grads: dict[str, np.ndarray] = {}
        for i, block in enumerate(self.hidden):
            grads[f"hidden.{i}.W"] = block.dense.dW
            grads[f"hidden.{i}.b"] = block.dense.db
            grads[f"hidden.{i}.gamma"] = block.bn.dgamma
            grads[f"hidden.{i}.beta"] = block.bn.dbeta
        grads["output.W"] = self.output.dW
        grads["output.b"] = self.output.db
        return grads

    def state(self) -> dict[str, np.ndarray]:
        """Every tensor, trainable or not, in the order checkpoints store them."""
        tensors: dict[str, np.ndarray] = {}
        for i, block in enumerate(self.hidden):
            tensors[f"hidden.{i}.W"] = block.dense.W
            tensors[f"hidden.{i}.b"] = block.dense.b
            tensors[f"hidden.{i}.gamma"] = block.bn.gamma
            tensors[f"hidden.{i}.beta"] = block.bn.beta
            tensors[f"hidden.{i}.running_mean"] = block.bn.running_mean
            tensors[f"hidden.{i}.running_var"] = block.bn.running_var
        tensors["output.W"] = self.output.W
        tensors["output.b"] = self.output.b
        return tensors

    def load_state(self, tensors: dict[str, np.ndarray]) -> None:
        """Copy values into the live arrays (shapes must match exactly)."""
        current = self.state()
        if set(tensors) != set(current):
            missing = sorted(set(current) ^ set(tensors))
            raise ShapeMismatch(f"State keys differ from the model's: {missing}")
        for name, target in current.items():
            source = np.asarray(tensors[name])
            if source.shape != target.shape:
                raise ShapeMismatch(f"{name}: expected {target.shape}, got {source.shape}")
            target[...] = source

    def copy(self) -> "MlpModel":
        """Deep snapshot of the weights and running statistics, without gradients."""
        hidden = [
            HiddenBlock(
                dense=replace(block.dense, dW=None, db=None),
                bn=replace(block.bn, dgamma=None, dbeta=None),
                dropout=block.dropout,
            )
            for block in self.hidden
        ]
        snapshot = replace(self, hidden=hidden, output=replace(self.output, dW=None, db=None))
        return copy.deepcopy(snapshot)
