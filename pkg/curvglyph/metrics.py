import numpy as np
from sklearn.metrics import balanced_accuracy_score, confusion_matrix, f1_score, precision_score, recall_score

from .schemas import ConfusedPair, EvalSummary


def predict_labels(logits: np.ndarray) -> np.ndarray:
    # np.argmax returns the first maximum, i.e. ties go to the lowest class index.
    return np.argmax(logits, axis=1)


def top1_accuracy(logits: np.ndarray, labels: np.ndarray) -> float:
    return float(np.mean(predict_labels(logits) == labels))


def most_confused_pairs(confusion: np.ndarray, limit: int = 5) -> list[ConfusedPair]:
    off_diagonal = confusion.copy()
    np.fill_diagonal(off_diagonal, 0)
    flat_order = np.argsort(-off_diagonal, axis=None, kind="stable")[:limit]
    pairs = []
    for flat in flat_order:
        true_class, predicted_class = np.unravel_index(flat, confusion.shape)
        count = int(off_diagonal[true_class, predicted_class])
        if count == 0:
            break
        pairs.append(ConfusedPair(true_class=int(true_class), predicted_class=int(predicted_class), count=count))
    return pairs


def summarize(logits: np.ndarray, labels: np.ndarray, loss: float, num_classes: int) -> EvalSummary:
    predicted = predict_labels(logits)
    classes = list(range(num_classes))
    confusion = confusion_matrix(labels, predicted, labels=classes)
    return EvalSummary(
        n=len(labels),
        loss=loss,
        top1=float(np.mean(predicted == labels)),
        macro_f1=float(f1_score(labels, predicted, labels=classes, average="macro", zero_division=0)),
        balanced_accuracy=float(balanced_accuracy_score(labels, predicted)),
        per_class_precision=precision_score(labels, predicted, labels=classes, average=None, zero_division=0).tolist(),
        per_class_recall=recall_score(labels, predicted, labels=classes, average=None, zero_division=0).tolist(),
        confusion=confusion.tolist(),
        confused_pairs=most_confused_pairs(confusion),
    )
