"""Brute-force reference implementations and synthetic fixtures.

Everything here exists to validate the optimized main-path code from the
test suite; nothing in this module shares graph or eigensolver code with
the rest of the package. Distances are accumulated with plain sequential
loops so that tie behavior is reproducible and independent of vectorized
summation order. Fixture sizes stay small (<= 200 samples) to keep the
oracle comparisons fast.
"""

import numpy as np

from .datasets import Dataset
from .graphs import LabelSet


def _sqdist(X, i, j):
    s = 0.0
    for t in range(X.shape[0]):
        diff = X[t, i] - X[t, j]
        s += diff * diff
    return s


def brute_knn_graph(X, labels: LabelSet, k1):
    """Same-class k1-nearest-neighbor graph by full distance enumeration."""
    n = X.shape[1]
    W = np.zeros((n, n))
    for j in range(n):
        others = [
            (_sqdist(X, i, j), i)
            for i in range(n)
            if i != j and labels.labels[i] == labels.labels[j]
        ]
        others.sort()
        for _, i in others[:k1]:
            W[i, j] = 1.0
            W[j, i] = 1.0
    return W


def brute_penalty_pairs(X, labels: LabelSet, k2):
    """Per-class k2 closest between-class pairs by full enumeration."""
    n = X.shape[1]
    W = np.zeros((n, n))
    for c in range(1, labels.n_classes + 1):
        pairs = [
            (_sqdist(X, i, j), i, j)
            for i in range(n)
            if labels.labels[i] == c
            for j in range(n)
            if labels.labels[j] != c
        ]
        pairs.sort()
        for _, i, j in pairs[:k2]:
            W[i, j] = 1.0
            W[j, i] = 1.0
    return W


def brute_scatter(X, labels: LabelSet):
    """Within-class and between-class scatter by direct summation."""
    m, n = X.shape
    global_mean = np.zeros(m)
    for j in range(n):
        global_mean += X[:, j]
    global_mean /= n

    class_means = {}
    for c in range(1, labels.n_classes + 1):
        idx = labels.class_indices(c)
        mean_c = np.zeros(m)
        for j in idx:
            mean_c += X[:, j]
        class_means[c] = mean_c / idx.size

    S_W = np.zeros((m, m))
    for j in range(n):
        diff = X[:, j] - class_means[int(labels.labels[j])]
        S_W += np.outer(diff, diff)

    S_B = np.zeros((m, m))
    for c in range(1, labels.n_classes + 1):
        diff = class_means[c] - global_mean
        S_B += labels.class_sizes[c - 1] * np.outer(diff, diff)
    return S_W, S_B


def rayleigh_check(A, M, values, vectors):
    """Max 2-norm of A w - lambda M w over the given pairs, no ridge."""
    worst = 0.0
    for j in range(vectors.shape[1]):
        w = vectors[:, j]
        r = A @ w - values[j] * (M @ w)
        worst = max(worst, float(np.linalg.norm(r)))
    return worst


def gaussian_blobs(seed, n_features=10, n_per_class=100, separation=6.0,
                   n_classes=2):
    """Unit-covariance Gaussian classes with means spaced along axis 0.

    Returns ``(X, labels)`` with samples as columns, class-block ordered.
    """
    rng = np.random.default_rng([seed])
    columns = []
    ids = []
    for c in range(n_classes):
        block = rng.standard_normal((n_features, n_per_class))
        block[0] += c * separation
        columns.append(block)
        ids.extend([c + 1] * n_per_class)
    X = np.concatenate(columns, axis=1)
    return X, LabelSet(np.array(ids))


def blobs_dataset(seed, n_features=10, n_per_class=100, separation=6.0,
                  n_classes=2, name="blobs"):
    """Gaussian blobs wrapped as a Dataset (values shifted non-negative)."""
    X, labels = gaussian_blobs(seed, n_features, n_per_class, separation,
                               n_classes)
    X = X - X.min()
    return Dataset(X=X, labels=labels, image_height=1, image_width=n_features,
                   name=name)


def grid_faces_dataset(seed, n_classes=8, n_per_class=10, height=3, width=4,
                       noise=0.5, name="synthetic-faces"):
    """Tiny face-shaped dataset: one random template per class plus noise."""
    rng = np.random.default_rng([seed])
    m = height * width
    templates = rng.uniform(50.0, 200.0, size=(m, n_classes))
    columns = []
    ids = []
    for c in range(n_classes):
        block = templates[:, [c]] + noise * rng.standard_normal((m, n_per_class))
        columns.append(block)
        ids.extend([c + 1] * n_per_class)
    X = np.clip(np.concatenate(columns, axis=1), 0.0, 255.0)
    return Dataset(X=X, labels=LabelSet(np.array(ids)), image_height=height,
                   image_width=width, name=name)


def rank_deficient_data(seed, n_features=20, rank=10, n_samples=50):
    """Random data confined to a random low-dimensional subspace."""
    rng = np.random.default_rng([seed])
    basis = rng.standard_normal((n_features, rank))
    coeffs = rng.standard_normal((rank, n_samples))
    return basis @ coeffs
