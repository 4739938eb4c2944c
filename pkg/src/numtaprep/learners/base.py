import time
import numpy as np

from typing import Any, Dict, NewType, Sequence

from ..errors import EmptyTrainingSet
from ..raster import as_gray

FeatureMatrix = NewType('FeatureMatrix', np.ndarray)

State = Dict[str, Any]


def features(images: Sequence[np.ndarray]) -> FeatureMatrix:
    """
    Flattens equally sized gray images into rows of pixels scaled to [0, 1].
    """
    if len(images) == 0:
        return FeatureMatrix(np.zeros((0, 0)))
    rows = [as_gray(img).ravel() for img in images]
    if len({len(r) for r in rows}) != 1:
        raise ValueError('all images must have the same dimensions')
    return FeatureMatrix(np.stack(rows).astype(np.float64) / 255.0)

def as_labels(y) -> np.ndarray:
    return np.asarray(y, dtype=np.int64).ravel()


class Classifier(object):
    """
    Abstract class for classifiers of the benchmark. Subclasses
    implement `_fit`, `_predict` and the state round trip used by
    the model container.
    """
    name = None

    def __init__(self, **params):
        self.params = params
        self.fit_seconds = None

    def fit(self, X: FeatureMatrix, y) -> 'Classifier':
        X = np.asarray(X, dtype=np.float64)
        y = as_labels(y)
        if len(X) == 0:
            raise EmptyTrainingSet(f'{self.name}: no training samples')
        if len(X) != len(y):
            raise ValueError(f'{len(X)} samples but {len(y)} labels')
        start = time.perf_counter()
        self._fit(X, y)
        self.fit_seconds = time.perf_counter() - start
        return self

    def predict(self, X: FeatureMatrix) -> np.ndarray:
        return self._predict(np.asarray(X, dtype=np.float64))

    def _fit(self, X: np.ndarray, y: np.ndarray):
        raise NotImplementedError()

    def _predict(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError()

    def get_state(self) -> State:
        raise NotImplementedError()

    @classmethod
    def from_state(cls, state: State) -> 'Classifier':
        raise NotImplementedError()

    def __repr__(self):
        params = ', '.join(f'{k}={v!r}' for k, v in sorted(self.params.items()))
        return f'{type(self).__name__}({params})'
