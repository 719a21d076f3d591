"""
Dense network primitives: initialisation, forward and backward passes of the
FC → BN → ReLU → Dropout stack with a linear output layer, fused softmax
cross-entropy, and the Adam optimiser.

Weights are stored (out, in); a layer computes ``x @ W.T + b``.
"""
import logging
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .errors import BatchTooSmall, CacheMismatch, LabelOutOfRange, ShapeMismatch
from .idx import SUPPORTED_CLASS_COUNTS
from .models import BatchNormLayer, DenseLayer, DropoutSpec, HiddenBlock, MlpModel
from .schemas import DEFAULT_ARCHITECTURE, Architecture, Mode

logger = logging.getLogger(__name__)


# ── Initialisation ─────────────────────────────────────────────────────────────

def glorot_bound(fan_in: int, fan_out: int) -> float:
    return float(np.sqrt(6.0 / (fan_in + fan_out)))


def _dense(rng: np.random.Generator, fan_in: int, fan_out: int, dtype) -> DenseLayer:
    bound = glorot_bound(fan_in, fan_out)
    W = rng.uniform(-bound, bound, size=(fan_out, fan_in)).astype(dtype)
    return DenseLayer(W=W, b=np.zeros(fan_out, dtype=dtype))


def init_model(
    num_classes: int,
    seed: int,
    architecture: Optional[Architecture] = None,
    dtype=np.float32,
) -> MlpModel:
    """
    Glorot-uniform weights, zero biases, BN gamma=1 beta=0 with running
    statistics (0, 1). Identical arguments give bit-identical models.
    """
    architecture = architecture or DEFAULT_ARCHITECTURE
    if architecture == DEFAULT_ARCHITECTURE and num_classes not in SUPPORTED_CLASS_COUNTS:
        raise ShapeMismatch(f"num_classes must be one of {SUPPORTED_CLASS_COUNTS}, got {num_classes}")
    if num_classes < 2:
        raise ShapeMismatch(f"num_classes must be at least 2, got {num_classes}")

    rng = np.random.Generator(np.random.PCG64(seed))
    hidden: list[HiddenBlock] = []
    fan_in = architecture.input_dim
    for width, rate in zip(architecture.hidden_dims, architecture.dropout_rates):
        bn = BatchNormLayer(
            gamma=np.ones(width, dtype=dtype),
            beta=np.zeros(width, dtype=dtype),
            running_mean=np.zeros(width, dtype=dtype),
            running_var=np.ones(width, dtype=dtype),
            momentum=architecture.bn_momentum,
            eps=architecture.bn_eps,
        )
        hidden.append(HiddenBlock(dense=_dense(rng, fan_in, width, dtype), bn=bn, dropout=DropoutSpec(rate)))
        fan_in = width

    return MlpModel(
        hidden=hidden,
        output=_dense(rng, fan_in, num_classes, dtype),
        num_classes=num_classes,
        architecture=architecture,
        seed=seed,
    )


def count_parameters(model: MlpModel, trainable_only: bool = True) -> int:
    tensors = model.parameters() if trainable_only else model.state()
    return int(sum(t.size for t in tensors.values()))


# ── Forward ────────────────────────────────────────────────────────────────────

@dataclass
class _BlockCache:
    x: np.ndarray
    xhat: np.ndarray
    inv_std: np.ndarray
    z: np.ndarray  # BN output, ReLU input
    mask: Optional[np.ndarray]


@dataclass
class ForwardCache:
    mode: Mode
    model_id: int
    batch_size: int
    blocks: list[_BlockCache] = field(default_factory=list)
    x_out: Optional[np.ndarray] = None  # input of the output layer


def forward(
    model: MlpModel,
    batch: np.ndarray,
    mode: Union[Mode, str] = Mode.infer,
    rng: Optional[np.random.Generator] = None,
) -> tuple[np.ndarray, ForwardCache]:
    """
    Logits (B, C). Train mode uses batch statistics, updates the BN running
    statistics and draws dropout masks from ``rng``; infer mode is a pure
    function of the model and the batch.
    """
    mode = Mode(mode)
    x = np.asarray(batch, dtype=model.dtype)
    if x.ndim != 2 or x.shape[1] != model.input_dim:
        raise ShapeMismatch(f"Expected a (B, {model.input_dim}) batch, got {x.shape}")
    if len(x) < 1:
        raise BatchTooSmall("Batch is empty")
    training = mode is Mode.train
    if training and len(x) < 2:
        raise BatchTooSmall(f"Batch normalisation needs at least 2 samples in train mode, got {len(x)}")
    if training and rng is None:
        rng = np.random.Generator(np.random.PCG64(model.seed))

    cache = ForwardCache(mode=mode, model_id=id(model), batch_size=len(x))
    for block in model.hidden:
        h = x @ block.dense.W.T + block.dense.b
        bn = block.bn
        if training:
            mean = h.mean(axis=0)
            var = h.var(axis=0)
            bn.running_mean *= bn.momentum
            bn.running_mean += (1.0 - bn.momentum) * mean
            bn.running_var *= bn.momentum
            bn.running_var += (1.0 - bn.momentum) * var
        else:
            mean, var = bn.running_mean, bn.running_var
        inv_std = 1.0 / np.sqrt(var + bn.eps)
        xhat = (h - mean) * inv_std
        z = bn.gamma * xhat + bn.beta
        a = np.maximum(z, 0)

        mask = None
        if training and block.dropout.rate > 0:
            keep = block.dropout.keep
            mask = (rng.random(a.shape, dtype=a.dtype) < keep).astype(a.dtype) / a.dtype.type(keep)
            a = a * mask

        if training:
            cache.blocks.append(_BlockCache(x=x, xhat=xhat, inv_std=inv_std, z=z, mask=mask))
        x = a

    cache.x_out = x if training else None
    logits = x @ model.output.W.T + model.output.b
    return logits, cache


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


def predict_proba(model: MlpModel, batch: np.ndarray) -> np.ndarray:
    logits, _ = forward(model, batch, Mode.infer)
    return softmax(logits)


def softmax_cross_entropy(logits: np.ndarray, labels: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean negative log-likelihood and its gradient (softmax − onehot) / B."""
    labels = np.asarray(labels)
    batch, classes = logits.shape
    if labels.shape != (batch,):
        raise ShapeMismatch(f"Expected {batch} labels, got shape {labels.shape}")
    if batch and (labels.min() < 0 or labels.max() >= classes):
        raise LabelOutOfRange(f"Labels must lie in [0, {classes})")

    shifted = logits - logits.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=1))
    rows = np.arange(batch)
    loss = float(np.mean(log_norm - shifted[rows, labels]))

    dlogits = np.exp(shifted - log_norm[:, None])
    dlogits[rows, labels] -= 1.0
    dlogits /= batch
    return loss, dlogits


# ── Backward ───────────────────────────────────────────────────────────────────

def backward(model: MlpModel, cache: ForwardCache, dlogits: np.ndarray) -> dict[str, np.ndarray]:
    """
    Gradients of every trainable tensor, stored on the layers and returned
    keyed like ``model.parameters()``.
    """
    if cache.mode is not Mode.train or cache.model_id != id(model):
        raise CacheMismatch("backward needs the cache of a train-mode forward pass on this model")
    if len(cache.blocks) != len(model.hidden) or dlogits.shape != (cache.batch_size, model.num_classes):
        raise CacheMismatch(
            f"dlogits shape {dlogits.shape} does not match the cached batch ({cache.batch_size}, {model.num_classes})"
        )

    dlogits = dlogits.astype(model.dtype, copy=False)
    model.output.dW = dlogits.T @ cache.x_out
    model.output.db = dlogits.sum(axis=0)
    da = dlogits @ model.output.W

    for i in reversed(range(len(model.hidden))):
        block, c = model.hidden[i], cache.blocks[i]
        if c.mask is not None:
            da = da * c.mask
        dz = da * (c.z > 0)

        block.bn.dgamma = (dz * c.xhat).sum(axis=0)
        block.bn.dbeta = dz.sum(axis=0)
        dxhat = dz * block.bn.gamma
        n = dxhat.shape[0]
        dh = (c.inv_std / n) * (n * dxhat - dxhat.sum(axis=0) - c.xhat * (dxhat * c.xhat).sum(axis=0))

        block.dense.dW = dh.T @ c.x
        block.dense.db = dh.sum(axis=0)
        if i > 0:
            da = dh @ block.dense.W

    return model.gradients()


# ── Adam ───────────────────────────────────────────────────────────────────────

@dataclass
class AdamState:
    alpha: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps_adam: float = 1e-8
    t: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)


def adam_step(
    state: AdamState, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]
) -> tuple[dict[str, np.ndarray], AdamState]:
    """Bias-corrected Adam update applied in place to ``params``."""
    if set(params) != set(grads):
        raise ShapeMismatch(f"Parameter and gradient names differ: {sorted(set(params) ^ set(grads))}")
    for name, p in params.items():
        if grads[name] is None or grads[name].shape != p.shape:
            got = None if grads[name] is None else grads[name].shape
            raise ShapeMismatch(f"{name}: gradient shape {got} does not match parameter {p.shape}")

    state.t += 1
    bias1 = 1.0 - state.beta1**state.t
    bias2 = 1.0 - state.beta2**state.t
    for name, p in params.items():
        g = grads[name]
        m = state.m.setdefault(name, np.zeros_like(p))
        v = state.v.setdefault(name, np.zeros_like(p))
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * (g * g)
        p -= state.alpha * (m / bias1) / (np.sqrt(v / bias2) + state.eps_adam)
    return params, state
