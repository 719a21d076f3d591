"""
Stratified fit / validation / test partitions.

Both hold-outs are drawn with scikit-learn's ``train_test_split``, so the
integer seed drives a ``RandomState`` (MT19937) and the per-class counts
follow scikit-learn's allocation: the hold-out size is ceil(fraction * n)
and each class receives floor or ceil of its proportional share.
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from sklearn.model_selection import train_test_split

from .errors import ConfigInvalid, EmptyClass
from .idx import LabeledDataset
from .schemas import SplitSummary

logger = logging.getLogger(__name__)

PRNG_NAME = "MT19937"
ALLOCATION = "sklearn-approximate-mode"


@dataclass(frozen=True)
class SplitPlan:
    fit_indices: np.ndarray
    val_indices: np.ndarray
    test_indices: np.ndarray
    seed: int
    dataset: str = ""
    test_fraction: float = 0.2
    val_fraction_of_train: float = 0.1
    stratify_val: bool = False
    test_per_class: tuple[int, ...] = ()

    @property
    def total(self) -> int:
        return len(self.fit_indices) + len(self.val_indices) + len(self.test_indices)

    def summary(self) -> SplitSummary:
        return SplitSummary(
            dataset=self.dataset,
            total=self.total,
            fit=len(self.fit_indices),
            val=len(self.val_indices),
            test=len(self.test_indices),
            test_fraction=self.test_fraction,
            val_fraction_of_train=self.val_fraction_of_train,
            seed=self.seed,
            prng=PRNG_NAME,
            allocation=ALLOCATION,
            stratify_val=self.stratify_val,
            test_per_class=list(self.test_per_class),
        )


def _hold_out(
    indices: np.ndarray, seed: int, stratify: Optional[np.ndarray], test_size=None, train_size=None
) -> tuple[np.ndarray, np.ndarray]:
    try:
        kept, held = train_test_split(
            indices, test_size=test_size, train_size=train_size, random_state=seed, stratify=stratify
        )
    except ValueError as exc:
        # too few samples per class, or a hold-out smaller than the class count
        raise ConfigInvalid(f"Cannot stratify {len(indices)} samples: {exc}") from exc
    return np.asarray(kept, dtype=np.int64), np.asarray(held, dtype=np.int64)


def stratified_split(
    dataset: LabeledDataset,
    test_fraction: float = 0.2,
    val_fraction_of_train: float = 0.1,
    seed: int = 42,
    stratify_val: bool = False,
) -> SplitPlan:
    """
    Stratified test hold-out, then a validation set taken from what remains.

    By default the validation set is an unstratified seeded draw from the
    training pool, the same as a fit-time ``validation_split``; with
    ``stratify_val`` it is stratified like the test set.
    """
    if not 0.0 < test_fraction < 1.0:
        raise ConfigInvalid(f"test_fraction must lie in (0, 1), got {test_fraction}")
    if not 0.0 <= val_fraction_of_train < 1.0:
        raise ConfigInvalid(f"val_fraction_of_train must lie in [0, 1), got {val_fraction_of_train}")
    if len(dataset) == 0:
        raise ConfigInvalid("Cannot split an empty dataset")

    empty = np.flatnonzero(dataset.class_counts() == 0)
    if len(empty):
        raise EmptyClass(f"{dataset.name}: class {int(empty[0])} has no samples")

    labels = dataset.labels
    everything = np.arange(len(dataset), dtype=np.int64)
    pool, test = _hold_out(everything, seed, labels, test_size=test_fraction)

    if val_fraction_of_train > 0:
        fit, val = _hold_out(pool, seed, labels[pool] if stratify_val else None, test_size=val_fraction_of_train)
    else:
        fit, val = pool, np.empty(0, dtype=np.int64)

    test = np.sort(test)
    plan = SplitPlan(
        fit_indices=fit,
        val_indices=val,
        test_indices=test,
        seed=seed,
        dataset=dataset.name,
        test_fraction=test_fraction,
        val_fraction_of_train=val_fraction_of_train,
        stratify_val=stratify_val,
        test_per_class=tuple(int(n) for n in np.bincount(labels[test], minlength=dataset.num_classes)),
    )
    logger.info(
        "Split %s (seed %d): fit=%d val=%d test=%d%s",
        dataset.name, seed, len(fit), len(val), len(test),
        "" if stratify_val else " (validation unstratified)",
    )
    return plan


def stratified_subset(dataset: LabeledDataset, size: int, seed: int = 42) -> LabeledDataset:
    """A class-proportional sample of ``size`` glyphs, in original order."""
    if not 0 < size <= len(dataset):
        raise ConfigInvalid(f"Subset size must lie in (0, {len(dataset)}], got {size}")
    if size == len(dataset):
        return dataset
    chosen, _ = _hold_out(np.arange(len(dataset), dtype=np.int64), seed, dataset.labels, train_size=size)
    chosen = np.sort(chosen)
    logger.info("Using a stratified subset of %d/%d glyphs", len(chosen), len(dataset))
    return LabeledDataset(
        images=dataset.images[chosen],
        labels=dataset.labels[chosen],
        num_classes=dataset.num_classes,
        name=dataset.name,
    )
