import numpy as np

from typing import NamedTuple, Optional, Tuple

from .base import Classifier, FeatureMatrix, State, as_labels
from ..errors import EmptyTrainingSet
from ..utils import make_batches

FEATURE_CHUNK = 64
N_CLASSES = 10


class TreeModel(NamedTuple):
    """
    Flat CART tree. Node 0 is the root; leaves have feature -1.
    A sample goes left when its feature value is <= threshold.
    """
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    @property
    def depth(self) -> int:
        depths = np.zeros(self.n_nodes, dtype=int)
        for i in range(self.n_nodes):
            if self.feature[i] >= 0:
                depths[self.left[i]] = depths[self.right[i]] = depths[i] + 1
        return int(depths.max())


def _majority(y: np.ndarray) -> int:
    return int(np.argmax(np.bincount(y, minlength=N_CLASSES)))

def best_split(X: np.ndarray, y: np.ndarray, min_leaf: int) -> Optional[Tuple[int, float]]:
    """
    Gini-optimal (feature, threshold) over midpoints between distinct
    sorted values, both children holding at least `min_leaf` samples.
    Ties go to the lower feature, then to the lower threshold.

    Minimizing the weighted child impurity is the same as maximizing
    sum(cl^2)/nl + sum(cr^2)/nr over the child class counts.
    """
    n, f = X.shape
    if n < 2 * min_leaf:
        return None
    Y = np.eye(N_CLASSES)[y]
    nl = np.arange(1, n)[:, None].astype(np.float64)
    nr = n - nl
    size_ok = (nl >= min_leaf) & (nr >= min_leaf)

    best, best_score = None, -np.inf
    for lo, hi in make_batches(f, FEATURE_CHUNK):
        cols = X[:, lo:hi]
        order = np.argsort(cols, axis=0, kind='stable')
        xs = np.take_along_axis(cols, order, axis=0)
        counts = np.cumsum(Y[order], axis=0)
        left = counts[:-1]
        right = counts[-1][None, :, :] - left
        score = (left ** 2).sum(axis=2) / nl + (right ** 2).sum(axis=2) / nr
        valid = (xs[:-1] < xs[1:]) & size_ok
        score = np.where(valid, score, -np.inf)

        pos = np.argmax(score, axis=0)
        top = score[pos, np.arange(hi - lo)]
        for j in range(hi - lo):
            if top[j] > best_score:
                i = pos[j]
                best_score = top[j]
                best = (lo + j, float((xs[i, j] + xs[i + 1, j]) / 2.0))
    return best

def tree_fit(X: FeatureMatrix, labels, max_depth: Optional[int] = 12, min_leaf: int = 2) -> TreeModel:
    X = np.asarray(X, dtype=np.float64)
    y = as_labels(labels)
    if len(X) == 0:
        raise EmptyTrainingSet('tree: no training samples')
    if min_leaf < 1:
        raise ValueError('min_leaf must be at least 1')

    feature, threshold, left, right, value = [], [], [], [], []

    def new_node(idx):
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(_majority(y[idx]))
        return len(feature) - 1

    stack = [(new_node(np.arange(len(y))), np.arange(len(y)), 0)]
    while stack:
        node, idx, depth = stack.pop()
        if np.all(y[idx] == y[idx[0]]):
            continue
        if max_depth is not None and depth >= max_depth:
            continue
        split = best_split(X[idx], y[idx], min_leaf)
        if split is None:
            continue
        feat, thr = split
        go_left = X[idx, feat] <= thr
        l_idx, r_idx = idx[go_left], idx[~go_left]
        feature[node], threshold[node] = feat, thr
        left[node], right[node] = new_node(l_idx), new_node(r_idx)
        stack.append((right[node], r_idx, depth + 1))
        stack.append((left[node], l_idx, depth + 1))

    return TreeModel(np.array(feature, dtype=np.int64), np.array(threshold, dtype=np.float64),
                     np.array(left, dtype=np.int64), np.array(right, dtype=np.int64),
                     np.array(value, dtype=np.int64))

def tree_predict(model: TreeModel, X: FeatureMatrix) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    node = np.zeros(len(X), dtype=np.int64)
    rows = np.arange(len(X))
    active = model.feature[node] >= 0
    while active.any():
        r, nd = rows[active], node[active]
        go_left = X[r, model.feature[nd]] <= model.threshold[nd]
        node[r] = np.where(go_left, model.left[nd], model.right[nd])
        active = model.feature[node] >= 0
    return model.value[node]


class TreeClassifier(Classifier):
    name = 'tree'

    def __init__(self, max_depth: Optional[int] = 12, min_leaf: int = 2):
        super().__init__(max_depth=max_depth, min_leaf=min_leaf)
        self.max_depth, self.min_leaf = max_depth, min_leaf
        self.model = None

    def _fit(self, X, y):
        self.model = tree_fit(X, y, self.max_depth, self.min_leaf)

    def _predict(self, X):
        return tree_predict(self.model, X)

    def get_state(self) -> State:
        state = {'max_depth': -1 if self.max_depth is None else self.max_depth,
                 'min_leaf': self.min_leaf}
        state.update(self.model._asdict())
        return state

    @classmethod
    def from_state(cls, state: State) -> 'TreeClassifier':
        depth = int(state['max_depth'])
        model = cls(None if depth < 0 else depth, int(state['min_leaf']))
        model.model = TreeModel(*(np.asarray(state[k]) for k in TreeModel._fields))
        return model
