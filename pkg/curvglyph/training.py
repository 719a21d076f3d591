"""
Training engine: seeded mini-batch epochs over precomputed descriptors,
early stopping on validation accuracy with best-weight restoration, and
learning-rate halving when validation loss stalls.
"""
import contextlib
import logging
import time
from typing import Optional

import numpy as np
from threadpoolctl import threadpool_limits

from .callbacks import EarlyStopping, ReduceLROnPlateau
from .errors import ConfigInvalid, DataMismatch, EmptyIndexSet, IndexOutOfRange
from .metrics import predict_labels, summarize
from .models import MlpModel
from .nn import AdamState, adam_step, backward, forward, softmax_cross_entropy
from .schemas import EpochRecord, EvalSummary, Mode, TrainConfig, TrainReport
from .splits import SplitPlan

logger = logging.getLogger(__name__)

EVAL_BATCH = 2048


def reduction_guard(deterministic: bool):
    """Pin BLAS pools to one thread so matrix reductions keep a fixed order."""
    return threadpool_limits(limits=1) if deterministic else contextlib.nullcontext()


def make_batches(order: np.ndarray, batch_size: int) -> list[np.ndarray]:
    """Consecutive slices of ``order``; a final slice of fewer than 2 joins its predecessor."""
    batches = [order[i : i + batch_size] for i in range(0, len(order), batch_size)]
    if len(batches) > 1 and len(batches[-1]) < 2:
        tail = batches.pop()
        batches[-1] = np.concatenate([batches[-1], tail])
    return batches


def _check_indices(indices: np.ndarray, n: int, what: str) -> None:
    if len(indices) and (indices.min() < 0 or indices.max() >= n):
        raise IndexOutOfRange(f"{what} indices must lie in [0, {n})")


# ── Evaluation ─────────────────────────────────────────────────────────────────

def infer_logits(model: MlpModel, features: np.ndarray, indices: np.ndarray, batch_size: int = EVAL_BATCH) -> np.ndarray:
    indices = np.asarray(indices)
    if len(indices) == 0:
        raise EmptyIndexSet("Cannot evaluate on an empty index set")
    _check_indices(indices, len(features), "Evaluation")
    chunks = [
        forward(model, features[indices[i : i + batch_size]], Mode.infer)[0]
        for i in range(0, len(indices), batch_size)
    ]
    return np.concatenate(chunks)


def evaluate(model: MlpModel, features: np.ndarray, labels: np.ndarray, indices: np.ndarray) -> tuple[float, float]:
    """Infer-mode (loss, top-1) over ``indices``; argmax ties go to the lowest class."""
    logits = infer_logits(model, features, indices)
    target = np.asarray(labels)[np.asarray(indices)]
    loss, _ = softmax_cross_entropy(logits.astype(np.float64), target)
    return loss, float(np.mean(predict_labels(logits) == target))


def evaluate_detailed(
    model: MlpModel, features: np.ndarray, labels: np.ndarray, indices: np.ndarray
) -> EvalSummary:
    logits = infer_logits(model, features, indices)
    target = np.asarray(labels)[np.asarray(indices)]
    loss, _ = softmax_cross_entropy(logits.astype(np.float64), target)
    return summarize(logits, target, loss, model.num_classes)


# ── Training ───────────────────────────────────────────────────────────────────

def _check_inputs(model: MlpModel, features: np.ndarray, labels: np.ndarray, split: SplitPlan) -> None:
    if features.ndim != 2 or len(features) != len(labels):
        raise DataMismatch(f"Features {features.shape} do not match {len(labels)} labels")
    if features.shape[1] != model.input_dim:
        raise DataMismatch(f"Features have {features.shape[1]} columns, model expects {model.input_dim}")
    if len(labels) and (labels.min() < 0 or labels.max() >= model.num_classes):
        raise DataMismatch(f"Labels fall outside the model's {model.num_classes} classes")
    for what, idx in (("fit", split.fit_indices), ("val", split.val_indices), ("test", split.test_indices)):
        _check_indices(idx, len(labels), what)
    if len(split.fit_indices) < 2:
        raise DataMismatch("The fit set needs at least 2 samples")
    if len(split.val_indices) == 0:
        raise ConfigInvalid("Early stopping and plateau scheduling need a non-empty validation set")


def train(
    model: MlpModel,
    features: np.ndarray,
    labels: np.ndarray,
    split: SplitPlan,
    cfg: TrainConfig,
) -> tuple[MlpModel, TrainReport]:
    """
    Fit ``model`` in place and return it with the weights of its best
    validation-accuracy epoch restored, plus the per-epoch report.
    """
    if not isinstance(cfg, TrainConfig):
        raise ConfigInvalid("cfg must be a TrainConfig")
    labels = np.asarray(labels)
    _check_inputs(model, features, labels, split)

    shuffle_seed, dropout_seed = np.random.SeedSequence(cfg.seed).spawn(2)
    shuffle_rng = np.random.Generator(np.random.PCG64(shuffle_seed))
    dropout_rng = np.random.Generator(np.random.PCG64(dropout_seed))

    optimizer = AdamState(alpha=cfg.lr0)
    stopper = EarlyStopping(patience=cfg.es_patience, min_delta=cfg.min_delta)
    scheduler = ReduceLROnPlateau(
        lr=cfg.lr0,
        patience=cfg.plateau_patience,
        factor=cfg.plateau_factor,
        min_lr=cfg.min_lr,
        min_delta=cfg.min_delta,
    )
    best: Optional[MlpModel] = None
    records: list[EpochRecord] = []
    reductions: list[int] = []
    fit = np.asarray(split.fit_indices)

    logger.info(
        "Training on %d samples, validating on %d (batch %d, lr %.4g, max %d epochs)",
        len(fit), len(split.val_indices), cfg.batch_size, cfg.lr0, cfg.max_epochs,
    )
    with reduction_guard(cfg.deterministic):
        for epoch in range(1, cfg.max_epochs + 1):
            started = time.perf_counter()
            lr = scheduler.lr
            optimizer.alpha = lr

            loss_sum, correct = 0.0, 0
            for batch in make_batches(shuffle_rng.permutation(fit), cfg.batch_size):
                x, y = features[batch], labels[batch]
                logits, cache = forward(model, x, Mode.train, dropout_rng)
                loss, dlogits = softmax_cross_entropy(logits, y)
                adam_step(optimizer, model.parameters(), backward(model, cache, dlogits))
                loss_sum += loss * len(batch)
                correct += int(np.sum(predict_labels(logits) == y))

            val_loss, val_acc = evaluate(model, features, labels, split.val_indices)
            elapsed = time.perf_counter() - started
            record = EpochRecord(
                epoch=epoch,
                train_loss=loss_sum / len(fit),
                train_acc=correct / len(fit),
                val_loss=val_loss,
                val_acc=val_acc,
                lr=lr,
                wall_time=0.0 if cfg.deterministic else elapsed,
            )
            records.append(record)
            logger.info(
                "Epoch %d: loss %.4f acc %.4f | val_loss %.4f val_acc %.4f | lr %.4g | %.1fs",
                epoch, record.train_loss, record.train_acc, val_loss, val_acc, lr, elapsed,
            )

            if stopper.update(epoch, val_acc):
                best = model.copy()
            if scheduler.update(epoch, val_loss) < lr:
                reductions.append(epoch)
            if stopper.stopped:
                break

        model.load_state(best.state())
        test_accuracy = None
        if len(split.test_indices):
            _, test_accuracy = evaluate(model, features, labels, split.test_indices)
            logger.info("Best epoch %d restored; test top-1 %.4f", stopper.best_epoch, test_accuracy)

    report = TrainReport(
        records=records,
        best_epoch=stopper.best_epoch,
        test_accuracy=test_accuracy,
        config=cfg,
        split=split.summary(),
        stopped_early=stopper.stopped,
        lr_reductions=reductions,
    )
    return model, report
