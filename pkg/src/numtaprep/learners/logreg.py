import logging
import numpy as np

from scipy.special import logsumexp
from typing import NamedTuple, Tuple

from .base import Classifier, FeatureMatrix, State, as_labels
from ..constants import NUMTAPREP_LOGGER
from ..errors import EmptyTrainingSet, SingleClass

logger = logging.getLogger(NUMTAPREP_LOGGER)

MIN_STEP_FRACTION = 1e-12


class LogRegModel(NamedTuple):
    W: np.ndarray
    b: np.ndarray
    classes: np.ndarray


def one_hot(y: np.ndarray, classes: np.ndarray) -> np.ndarray:
    return (y[:, None] == classes[None, :]).astype(np.float64)

def logreg_loss_and_grad(W: np.ndarray, b: np.ndarray, X: np.ndarray, Y: np.ndarray,
                         l2: float) -> Tuple[float, np.ndarray, np.ndarray]:
    """
    Mean softmax cross-entropy plus (l2 / 2) * ||W||^2, the bias
    being unregularized. `Y` is the one-hot target matrix.
    """
    logits = X @ W + b
    log_norm = logsumexp(logits, axis=1, keepdims=True)
    log_p = logits - log_norm
    n = len(X)
    loss = -float(np.sum(Y * log_p)) / n + 0.5 * l2 * float(np.sum(W * W))
    delta = (np.exp(log_p) - Y) / n
    return loss, X.T @ delta + l2 * W, delta.sum(axis=0)

def logreg_fit(X: FeatureMatrix, labels, epochs: int = 300, lr: float = 0.5,
               l2: float = 1e-4) -> Tuple[LogRegModel, np.ndarray]:
    """
    Full-batch gradient descent from zero weights. A step that would
    raise the loss is retried with half the step size, so the returned
    per-epoch loss history never increases.
    """
    X = np.asarray(X, dtype=np.float64)
    y = as_labels(labels)
    if len(X) == 0:
        raise EmptyTrainingSet('logreg: no training samples')
    classes = np.unique(y)
    if len(classes) < 2:
        raise SingleClass(f'logreg needs at least two classes, got {classes.tolist()}')

    Y = one_hot(y, classes)
    W = np.zeros((X.shape[1], len(classes)))
    b = np.zeros(len(classes))
    loss, gW, gb = logreg_loss_and_grad(W, b, X, Y, l2)
    history = [loss]

    for epoch in range(epochs):
        step = lr
        while step >= lr * MIN_STEP_FRACTION:
            W_new, b_new = W - step * gW, b - step * gb
            new_loss, new_gW, new_gb = logreg_loss_and_grad(W_new, b_new, X, Y, l2)
            if new_loss <= loss:
                break
            step /= 2
        else:
            logger.debug(f'logreg: no descent step left at epoch {epoch}, stopping')
            break
        if step < lr:
            logger.debug(f'logreg: step halved to {step:.3g} at epoch {epoch}')
        W, b, loss, gW, gb = W_new, b_new, new_loss, new_gW, new_gb
        history.append(loss)

    return LogRegModel(W, b, classes), np.asarray(history)

def logreg_predict(model: LogRegModel, X: FeatureMatrix) -> np.ndarray:
    scores = np.asarray(X, dtype=np.float64) @ model.W + model.b
    return model.classes[np.argmax(scores, axis=1)]


class LogRegClassifier(Classifier):
    name = 'logreg'

    def __init__(self, epochs: int = 300, lr: float = 0.5, l2: float = 1e-4):
        super().__init__(epochs=epochs, lr=lr, l2=l2)
        self.epochs, self.lr, self.l2 = epochs, lr, l2
        self.model = None
        self.loss_history = None

    def _fit(self, X, y):
        self.model, self.loss_history = logreg_fit(X, y, self.epochs, self.lr, self.l2)

    def _predict(self, X):
        return logreg_predict(self.model, X)

    def get_state(self) -> State:
        return {'epochs': self.epochs, 'lr': self.lr, 'l2': self.l2,
                'W': self.model.W, 'b': self.model.b, 'classes': self.model.classes}

    @classmethod
    def from_state(cls, state: State) -> 'LogRegClassifier':
        model = cls(int(state['epochs']), float(state['lr']), float(state['l2']))
        model.model = LogRegModel(np.asarray(state['W'], dtype=np.float64),
                                  np.asarray(state['b'], dtype=np.float64),
                                  as_labels(state['classes']))
        return model
