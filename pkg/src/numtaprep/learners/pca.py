import logging
import warnings
import numpy as np
import scipy.linalg as lg

from typing import NamedTuple

from .base import Classifier, FeatureMatrix, State
from ..constants import NUMTAPREP_LOGGER
from ..errors import RankDeficient

logger = logging.getLogger(NUMTAPREP_LOGGER)

# relative eigenvalue cutoff below which a direction counts as zero-variance
RANK_TOL = 1e-10


class PcaModel(NamedTuple):
    mean: np.ndarray
    components: np.ndarray
    variances: np.ndarray
    rank_deficient: bool = False

    @property
    def n_components(self) -> int:
        return len(self.components)


def pca_fit(X: FeatureMatrix, d: int) -> PcaModel:
    """
    Top-d eigenvectors of the sample covariance of mean-centered X,
    ordered by decreasing variance. Each component is signed so that
    its largest-magnitude entry is positive.

    When fewer than d directions carry positive variance, only those
    are returned and the model is flagged (with a `RankDeficient`
    warning).
    """
    X = np.asarray(X, dtype=np.float64)
    n, f = X.shape
    if not 1 <= d <= min(n, f):
        raise ValueError(f'd must lie in [1, {min(n, f)}], got {d}')

    mean = X.mean(axis=0)
    centered = X - mean
    cov = centered.T @ centered / max(n - 1, 1)
    vals, vecs = lg.eigh(cov)
    vals, vecs = vals[::-1], vecs[:, ::-1]

    cutoff = RANK_TOL * max(float(vals[0]), 1.0)
    positive = int(np.count_nonzero(vals > cutoff))
    deficient = d > positive
    if deficient:
        msg = f'requested {d} components but only {positive} have positive variance'
        logger.warning(msg)
        warnings.warn(msg, RankDeficient)
        d = positive

    comps = vecs[:, :d].T.copy()
    pivots = np.argmax(np.abs(comps), axis=1)
    signs = np.sign(comps[np.arange(d), pivots])
    comps *= signs[:, None]
    return PcaModel(mean, comps, np.clip(vals[:d], 0.0, None), deficient)

def pca_transform(model: PcaModel, X: FeatureMatrix) -> FeatureMatrix:
    return FeatureMatrix((np.asarray(X, dtype=np.float64) - model.mean) @ model.components.T)

def pca_inverse(model: PcaModel, Z: np.ndarray) -> FeatureMatrix:
    return FeatureMatrix(np.asarray(Z, dtype=np.float64) @ model.components + model.mean)


class PcaClassifier(Classifier):
    """
    Projects onto the leading principal components before handing
    the data to an inner classifier.
    """

    def __init__(self, inner: Classifier, n_components: int = 50):
        super().__init__(inner=inner.name, n_components=n_components, **inner.params)
        self.name = f'{inner.name}_pca'
        self.inner = inner
        self.n_components = n_components
        self.pca = None

    def _fit(self, X, y):
        d = min(self.n_components, *X.shape)
        with warnings.catch_warnings():
            warnings.simplefilter('ignore', RankDeficient)
            self.pca = pca_fit(X, d)
        self.inner.fit(pca_transform(self.pca, X), y)

    def _predict(self, X):
        return self.inner.predict(pca_transform(self.pca, X))

    def get_state(self) -> State:
        state = {'inner': self.inner.name, 'n_components': self.n_components,
                 'pca.mean': self.pca.mean, 'pca.components': self.pca.components,
                 'pca.variances': self.pca.variances}
        state.update({'inner.' + k: v for k, v in self.inner.get_state().items()})
        return state

    @classmethod
    def from_state(cls, state: State) -> 'PcaClassifier':
        from . import get_model_class

        inner_state = {k[len('inner.'):]: v for k, v in state.items() if k.startswith('inner.')}
        inner = get_model_class(str(state['inner'])).from_state(inner_state)
        model = cls(inner, n_components=int(state['n_components']))
        model.pca = PcaModel(np.asarray(state['pca.mean']), np.asarray(state['pca.components']),
                             np.asarray(state['pca.variances']))
        return model
