import numpy as np

from scipy.spatial.distance import cdist

from .base import Classifier, FeatureMatrix, State, as_labels
from ..errors import ConfigError, EmptyTrainingSet
from ..utils import make_batches

QUERY_BATCH = 256


def _vote(dists: np.ndarray, labels: np.ndarray, k: int) -> int:
    """
    Majority label among the k nearest rows, nearness ordered by
    (distance, label). Vote ties go to the smaller summed distance,
    then to the smaller label.
    """
    if k < len(dists):
        kth = np.partition(dists, k - 1)[k - 1]
        cand = np.flatnonzero(dists <= kth)
    else:
        cand = np.arange(len(dists))
    order = cand[np.lexsort((labels[cand], dists[cand]))][:k]

    best = None
    for lbl in np.unique(labels[order]):
        sel = labels[order] == lbl
        key = (-int(sel.sum()), float(dists[order][sel].sum()), int(lbl))
        if best is None or key < best:
            best = key
    return best[2]

def knn_predict(train_X: FeatureMatrix, train_y, query_X: FeatureMatrix, k: int = 5) -> np.ndarray:
    train_X = np.asarray(train_X, dtype=np.float64)
    train_y = as_labels(train_y)
    query_X = np.asarray(query_X, dtype=np.float64)
    if len(train_X) == 0:
        raise EmptyTrainingSet('knn: no training samples')
    if not 1 <= k <= len(train_X):
        raise ConfigError(f'knn.k must lie in [1, {len(train_X)}], got {k}')

    out = np.empty(len(query_X), dtype=np.int64)
    for lo, hi in make_batches(len(query_X), QUERY_BATCH):
        dists = cdist(query_X[lo:hi], train_X, 'euclidean')
        for i, row in enumerate(dists):
            out[lo + i] = _vote(row, train_y, k)
    return out


class KnnClassifier(Classifier):
    name = 'knn'

    def __init__(self, k: int = 5):
        super().__init__(k=k)
        self.k = k
        self._X = None
        self._y = None

    def _fit(self, X, y):
        if self.k > len(X):
            raise ConfigError(f'knn.k={self.k} exceeds the {len(X)} training samples')
        self._X, self._y = X.copy(), y.copy()

    def _predict(self, X):
        return knn_predict(self._X, self._y, X, self.k)

    def get_state(self) -> State:
        return {'k': self.k, 'X': self._X, 'y': self._y}

    @classmethod
    def from_state(cls, state: State) -> 'KnnClassifier':
        model = cls(k=int(state['k']))
        model._X = np.asarray(state['X'], dtype=np.float64)
        model._y = as_labels(state['y'])
        return model
