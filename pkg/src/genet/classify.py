"""Linear one-vs-rest SVM over embedded features, plus a nearest-class-mean
baseline used by the test suite.

The binary subproblems minimize ``(1/2)||w||^2 + cost * sum hinge`` by dual
coordinate descent with a per-epoch random permutation. The bias is handled
by appending a constant feature, so it is (mildly) regularized. Each class
gets its own RNG stream derived from (seed, class id), which makes results
independent of training order; identical inputs give bit-identical models.
"""

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import (
    DimensionMismatchError,
    NonFiniteError,
    SingleClassError,
)
from .graphs import LabelSet

DEFAULT_COST = 1.0
DEFAULT_MAX_EPOCHS = 1000
# stop when the dual objective moves less than this between epochs
DUAL_TOL = 1e-6


@dataclass(frozen=True)
class SvmModel:
    """One weight vector and bias per class, argmax-scored."""

    weights: np.ndarray  # (n_classes, n_features)
    biases: np.ndarray  # (n_classes,)
    n_classes: int
    cost: float
    seed: int
    max_epochs: int
    epochs_run: tuple

    @property
    def n_features(self):
        return self.weights.shape[1]


@njit(cache=True)
def _cd_epoch(samples, y, alpha, w, qii, cost, order):
    for t in range(order.shape[0]):
        i = order[t]
        xi = samples[i]
        g = 0.0
        for k in range(xi.shape[0]):
            g += w[k] * xi[k]
        g = y[i] * g - 1.0
        a = alpha[i]
        if a <= 0.0:
            pg = g if g < 0.0 else 0.0
        elif a >= cost:
            pg = g if g > 0.0 else 0.0
        else:
            pg = g
        if pg != 0.0:
            new_a = a - g / qii[i]
            if new_a < 0.0:
                new_a = 0.0
            elif new_a > cost:
                new_a = cost
            delta = (new_a - a) * y[i]
            if delta != 0.0:
                alpha[i] = new_a
                for k in range(xi.shape[0]):
                    w[k] += delta * xi[k]


def _train_binary(samples, y, cost, seed, max_epochs, tol):
    n = samples.shape[0]
    w = np.zeros(samples.shape[1])
    alpha = np.zeros(n)
    qii = np.einsum("ij,ij->i", samples, samples)
    rng = np.random.default_rng([seed])
    prev_obj = None
    epochs = 0
    for epoch in range(max_epochs):
        order = rng.permutation(n)
        _cd_epoch(samples, y, alpha, w, qii, cost, order)
        epochs = epoch + 1
        obj = 0.5 * float(w @ w) - float(alpha.sum())
        if prev_obj is not None and abs(prev_obj - obj) < tol:
            break
        prev_obj = obj
    return w, epochs


def _class_seed(seed, class_id):
    return int(np.random.SeedSequence([seed, class_id]).generate_state(1)[0])


def svm_fit(Y, labels: LabelSet, cost=DEFAULT_COST, seed=0,
            max_epochs=DEFAULT_MAX_EPOCHS, tol=DUAL_TOL):
    """Fit one-vs-rest linear SVMs on column-sample features.

    Parameters
    ----------
    Y : (d, n) array of features, one sample per column.
    labels : LabelSet over the n samples.
    cost : hinge penalty weight (> 0).
    seed : controls the per-epoch coordinate permutations.
    """
    Y = np.asarray(Y, dtype=np.float64)
    if not np.all(np.isfinite(Y)):
        raise NonFiniteError("features contain NaN or Inf")
    if cost <= 0.0:
        raise ValueError("cost must be > 0")
    n = Y.shape[1]
    if len(labels) != n:
        raise DimensionMismatchError("label count must match sample count")
    if labels.n_classes < 2:
        raise SingleClassError("svm needs at least two classes")

    samples = np.ascontiguousarray(
        np.concatenate([Y, np.ones((1, n))], axis=0).T
    )
    d = Y.shape[0]
    weights = np.zeros((labels.n_classes, d))
    biases = np.zeros(labels.n_classes)
    epochs_run = []
    for c in range(1, labels.n_classes + 1):
        target = np.where(labels.labels == c, 1.0, -1.0)
        w_aug, epochs = _train_binary(
            samples, target, cost, _class_seed(seed, c), max_epochs, tol
        )
        weights[c - 1] = w_aug[:d]
        biases[c - 1] = w_aug[d]
        epochs_run.append(epochs)
    return SvmModel(
        weights=weights,
        biases=biases,
        n_classes=labels.n_classes,
        cost=cost,
        seed=seed,
        max_epochs=max_epochs,
        epochs_run=tuple(epochs_run),
    )


def svm_predict(model: SvmModel, Y):
    """Argmax of class scores w^T x + b; ties go to the smaller class id."""
    Y = np.asarray(Y, dtype=np.float64)
    if Y.shape[0] != model.n_features:
        raise DimensionMismatchError(
            f"model expects {model.n_features}-dim features, got {Y.shape[0]}"
        )
    scores = model.weights @ Y + model.biases[:, np.newaxis]
    # np.argmax returns the first maximum, i.e. the smaller class id
    return np.argmax(scores, axis=0).astype(np.int64) + 1


@dataclass(frozen=True)
class NearestClassMeanModel:
    means: np.ndarray  # (n_classes, n_features)


def nearest_class_mean_fit(Y, labels: LabelSet):
    Y = np.asarray(Y, dtype=np.float64)
    means = np.zeros((labels.n_classes, Y.shape[0]))
    for c in range(1, labels.n_classes + 1):
        means[c - 1] = Y[:, labels.class_indices(c)].mean(axis=1)
    return NearestClassMeanModel(means=means)


def nearest_class_mean_predict(model: NearestClassMeanModel, Y):
    """Label of the Euclidean-nearest class mean; ties to the smaller id."""
    Y = np.asarray(Y, dtype=np.float64)
    if Y.shape[0] != model.means.shape[1]:
        raise DimensionMismatchError("feature dimension mismatch")
    d2 = (
        np.sum(model.means**2, axis=1)[:, np.newaxis]
        - 2.0 * (model.means @ Y)
        + np.sum(Y**2, axis=0)[np.newaxis, :]
    )
    return np.argmin(d2, axis=0).astype(np.int64) + 1


def accuracy(predicted, truth):
    """Fraction of exact label matches."""
    predicted = np.asarray(predicted)
    truth = np.asarray(truth)
    if predicted.shape != truth.shape:
        raise DimensionMismatchError("prediction and truth lengths differ")
    if predicted.size == 0:
        raise ValueError("accuracy of an empty prediction is undefined")
    return float(np.mean(predicted == truth))
