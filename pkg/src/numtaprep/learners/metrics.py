import time
import numpy as np

from dataclasses import dataclass
from typing import Optional

from .base import Classifier, FeatureMatrix, as_labels
from ..errors import EmptyTestSet

N_CLASSES = 10


@dataclass
class Metrics:
    accuracy: float
    confusion: np.ndarray
    fit_seconds: Optional[float]
    predict_seconds: float

    @property
    def n_test(self) -> int:
        return int(self.confusion.sum())

    def __str__(self):
        fit = 'n/a' if self.fit_seconds is None else f'{self.fit_seconds:.3f}s'
        return (f'accuracy {self.accuracy:.5f} on {self.n_test} item(s), '
                f'fit {fit}, predict {self.predict_seconds:.3f}s')


def confusion_matrix(y_true, y_pred, n_classes: int = N_CLASSES) -> np.ndarray:
    """
    Rows are true labels, columns predicted labels.
    """
    conf = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(conf, (as_labels(y_true), as_labels(y_pred)), 1)
    return conf

def evaluate(model: Classifier, X: FeatureMatrix, y) -> Metrics:
    y = as_labels(y)
    if len(y) == 0:
        raise EmptyTestSet(f'{model.name}: empty test set')
    start = time.perf_counter()
    pred = model.predict(X)
    predict_seconds = time.perf_counter() - start
    conf = confusion_matrix(y, pred)
    return Metrics(float(np.trace(conf)) / len(y), conf, model.fit_seconds, predict_seconds)
