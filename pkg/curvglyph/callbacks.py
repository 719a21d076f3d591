"""
Epoch-end monitors: early stopping on a maximised metric and learning-rate
reduction on a minimised one.
"""
import logging
import math
from typing import Optional

logger = logging.getLogger(__name__)


class EarlyStopping:
    """
    Tracks a metric to maximise. ``best_epoch`` is the earliest epoch with
    the highest value seen; the patience counter only resets when the metric
    beats the value it last reset on by more than ``min_delta``.
    """

    def __init__(self, patience: int = 10, min_delta: float = 1e-4):
        if patience < 1:
            raise ValueError("patience must be at least 1")
        self.patience = patience
        self.min_delta = min_delta
        self.best_value = -math.inf
        self.best_epoch: Optional[int] = None
        self._reference = -math.inf
        self.wait = 0
        self.stopped = False

    def update(self, epoch: int, value: float) -> bool:
        """Record ``value``; return True when it is a new best (snapshot the weights)."""
        is_best = value > self.best_value
        if is_best:
            self.best_value = value
            self.best_epoch = epoch

        if value > self._reference + self.min_delta:
            self._reference = value
            self.wait = 0
        else:
            self.wait += 1
            logger.debug("Early stopping counter: %d/%d", self.wait, self.patience)
            if self.wait >= self.patience:
                self.stopped = True
                logger.info("Early stopping at epoch %d; best epoch %s", epoch, self.best_epoch)
        return is_best


class ReduceLROnPlateau:
    """Multiply the learning rate by ``factor`` after ``patience`` epochs without a lower metric."""

    def __init__(self, lr: float, patience: int = 3, factor: float = 0.5, min_lr: float = 1e-5, min_delta: float = 1e-4):
        if not 0.0 < factor < 1.0:
            raise ValueError("factor must lie in (0, 1)")
        self.lr = lr
        self.patience = patience
        self.factor = factor
        self.min_lr = min_lr
        self.min_delta = min_delta
        self.best = math.inf
        self.wait = 0

    def update(self, epoch: int, value: float) -> float:
        """Record ``value`` and return the learning rate for the next epoch."""
        if value < self.best - self.min_delta:
            self.best = value
            self.wait = 0
            return self.lr

        self.wait += 1
        if self.wait >= self.patience and self.lr > self.min_lr:
            new_lr = max(self.lr * self.factor, self.min_lr)
            logger.info("Epoch %d: reducing learning rate %.4g -> %.4g", epoch, self.lr, new_lr)
            self.lr = new_lr
            self.wait = 0
        return self.lr
