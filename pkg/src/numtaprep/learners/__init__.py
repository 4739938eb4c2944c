"""
From-scratch classical classifiers for the raw-vs-preprocessed
benchmark, their evaluation and their on-disk container.
"""
from typing import Any, Dict, Optional, Type

from .base import *
from .knn import *
from .pca import *
from .logreg import *
from .tree import *
from .metrics import *
from .container import *
from ..errors import UnsupportedModelType

_model_classes = {
    'knn': KnnClassifier,
    'knn_pca': PcaClassifier,
    'logreg': LogRegClassifier,
    'logreg_pca': PcaClassifier,
    'tree': TreeClassifier,
}

_base_models = {
    'knn': KnnClassifier,
    'logreg': LogRegClassifier,
    'tree': TreeClassifier,
}

IMPLEMENTED_MODELS = tuple(_model_classes)
RESERVED_MODELS = ('cnn', 'capsnet', 'svm', 'svm_pca')


def get_model_class(name: str) -> Type[Classifier]:
    try:
        return _model_classes[name]
    except KeyError:
        if name in RESERVED_MODELS:
            raise UnsupportedModelType(f'{name} is reserved but not implemented')
        raise UnsupportedModelType(name)

def get_model(name: str, params: Optional[Dict[str, Dict[str, Any]]] = None) -> Classifier:
    """
    Builds an unfitted model from its registry name. `params` maps a
    config section ('knn', 'pca', 'logreg', 'tree') to keyword
    arguments; PCA variants read the 'pca' section plus the section
    of their inner model.
    """
    params = params or {}
    cls = get_model_class(name)
    if cls is PcaClassifier:
        base = name[:-len('_pca')]
        inner = _base_models[base](**params.get(base, {}))
        return PcaClassifier(inner, **params.get('pca', {}))
    return cls(**params.get(name, {}))
