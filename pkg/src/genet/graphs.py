"""Graph builders and the linearized graph-preserving embedding solver.

A dimensionality reduction problem is described by a :class:`GraphPair`: an
intrinsic similarity matrix ``W`` whose edges should stay close after
projection, and a constraint matrix ``B`` that is either the identity or a
penalty-graph Laplacian whose edges should be pushed apart. The solver turns
the pair into a (generalized) eigenproblem on the data matrix.

Conventions: samples are columns of ``X``; class labels are contiguous
integers ``1..n_classes``; graph diagonals are always zero (self-similarity
carries no information for the Laplacian, which sums over ``j != i``).
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from . import linalg
from .errors import (
    DimensionMismatchError,
    DimensionTooLargeError,
    EmptyClassError,
    NonFiniteError,
    SingleClassError,
    TooFewSamplesError,
)


class LabelSet:
    """Integer class labels with per-class index sets.

    Labels must be contiguous ``1..n_classes`` with every class non-empty;
    use :meth:`from_raw` to remap arbitrary hashable ids (first-appearance
    order is preserved).
    """

    def __init__(self, labels):
        labels = np.asarray(labels)
        if labels.ndim != 1 or labels.size == 0:
            raise EmptyClassError("labels must be a non-empty 1-D sequence")
        if not np.issubdtype(labels.dtype, np.integer):
            raise EmptyClassError("labels must be integers; use from_raw to remap")
        labels = labels.astype(np.int64)
        n_classes = int(labels.max()) if labels.size else 0
        if labels.min() < 1:
            raise EmptyClassError("class ids must be >= 1")
        counts = np.bincount(labels, minlength=n_classes + 1)[1:]
        if np.any(counts == 0):
            missing = int(np.flatnonzero(counts == 0)[0]) + 1
            raise EmptyClassError(f"class {missing} has no samples")
        self.labels = labels
        self.n_classes = n_classes
        self.class_sizes = counts
        self._indices = [np.flatnonzero(labels == c) for c in range(1, n_classes + 1)]

    @classmethod
    def from_raw(cls, raw):
        """Remap arbitrary integer ids to contiguous 1..n_classes."""
        raw = np.asarray(raw)
        seen = {}
        mapped = np.empty(raw.shape[0], dtype=np.int64)
        for i, value in enumerate(raw.tolist()):
            if value not in seen:
                seen[value] = len(seen) + 1
            mapped[i] = seen[value]
        return cls(mapped)

    def __len__(self):
        return self.labels.size

    def class_indices(self, c):
        """Sample indices of class ``c`` (1-based id), ascending."""
        return self._indices[c - 1]

    def __eq__(self, other):
        return isinstance(other, LabelSet) and np.array_equal(self.labels, other.labels)


@dataclass(frozen=True)
class GraphPair:
    """Intrinsic similarity matrix W and constraint matrix B (identity or
    a penalty Laplacian), both N x N."""

    W: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        W, B = self.W, self.B
        if W.shape[0] != W.shape[1] or B.shape != W.shape:
            raise DimensionMismatchError(
                f"W and B must be square and equally sized, got {W.shape}, {B.shape}"
            )
        if not (np.all(np.isfinite(W)) and np.all(np.isfinite(B))):
            raise NonFiniteError("graph matrices must be finite")
        linalg._require_symmetric(W, "W")
        linalg._require_symmetric(B, "B")
        if np.any(np.diag(W) != 0.0):
            raise ValueError("intrinsic graph must have a zero diagonal")

    @property
    def n_samples(self):
        return self.W.shape[0]

    def has_identity_constraint(self):
        return bool(np.array_equal(self.B, np.eye(self.B.shape[0])))


def laplacian(W):
    """Diagonal degree matrix and Laplacian of a similarity matrix.

    ``D_ii`` sums the off-diagonal entries of row i and ``L = D - W``; any
    diagonal entries of ``W`` are ignored (treated as zero).
    """
    W = linalg._as_matrix(W, "W")
    linalg._require_symmetric(W, "W")
    W = W.copy()
    np.fill_diagonal(W, 0.0)
    D = np.diag(W.sum(axis=1))
    return D, D - W


def pca_graph(n_samples):
    """Uniform all-pairs similarity 1/N with identity constraint."""
    if n_samples < 2:
        raise TooFewSamplesError("pca graph needs at least 2 samples")
    W = np.full((n_samples, n_samples), 1.0 / n_samples)
    np.fill_diagonal(W, 0.0)
    return GraphPair(W=W, B=np.eye(n_samples))


def lda_graph(labels: LabelSet):
    """Within-class similarity 1/n_c with the centering constraint.

    ``W_ij = 1/n_c`` when i and j share class c (i != j), so the intrinsic
    Laplacian quadratic form is the within-class scatter; ``B`` is the
    centering matrix, whose quadratic form is the total scatter.
    """
    n = len(labels)
    if n < 2:
        raise TooFewSamplesError("lda graph needs at least 2 samples")
    W = np.zeros((n, n))
    for c in range(1, labels.n_classes + 1):
        idx = labels.class_indices(c)
        W[np.ix_(idx, idx)] = 1.0 / idx.size
    np.fill_diagonal(W, 0.0)
    B = np.eye(n) - np.full((n, n), 1.0 / n)
    return GraphPair(W=W, B=B)


def pairwise_sqdist(X):
    """Squared Euclidean distances between columns of X."""
    XT = np.ascontiguousarray(X.T)
    return cdist(XT, XT, "sqeuclidean")


def mfa_intrinsic_graph(X, labels: LabelSet, k1, sqdist=None):
    """0/1 graph joining each sample to its k1 nearest same-class neighbors.

    An edge exists when either endpoint selects the other. Distance ties are
    broken by the smaller sample index. Classes with at most k1+1 members end
    up fully connected internally.
    """
    X = linalg._as_matrix(X, "X")
    if k1 < 1:
        raise ValueError("k1 must be >= 1")
    n = X.shape[1]
    if len(labels) != n:
        raise DimensionMismatchError("label count must match sample count")
    dist = pairwise_sqdist(X) if sqdist is None else sqdist
    W = np.zeros((n, n))
    for c in range(1, labels.n_classes + 1):
        idx = labels.class_indices(c)
        if idx.size < 2:
            continue
        sub = dist[np.ix_(idx, idx)].copy()
        np.fill_diagonal(sub, np.inf)
        k = min(k1, idx.size - 1)
        for j in range(idx.size):
            # lexsort: last key is primary, so distance first, then index
            order = np.lexsort((np.arange(idx.size), sub[j]))[:k]
            W[idx[j], idx[order]] = 1.0
            W[idx[order], idx[j]] = 1.0
    return W


def mfa_penalty_graph(X, labels: LabelSet, k2, sqdist=None):
    """0/1 graph joining, for each class, its k2 closest between-class pairs.

    For every class c the pairs (i in c, j not in c) are ranked by distance
    ascending with ties broken by the smaller pair indices; the k2 first
    pairs (all of them, if fewer exist) contribute symmetric edges.
    """
    X = linalg._as_matrix(X, "X")
    if k2 < 1:
        raise ValueError("k2 must be >= 1")
    if labels.n_classes < 2:
        raise SingleClassError("penalty graph needs at least two classes")
    n = X.shape[1]
    if len(labels) != n:
        raise DimensionMismatchError("label count must match sample count")
    dist = pairwise_sqdist(X) if sqdist is None else sqdist
    W = np.zeros((n, n))
    all_idx = np.arange(n)
    for c in range(1, labels.n_classes + 1):
        inside = labels.class_indices(c)
        outside = all_idx[labels.labels != c]
        sub = dist[np.ix_(inside, outside)]
        flat = sub.ravel()
        ii = np.repeat(inside, outside.size)
        jj = np.tile(outside, inside.size)
        take = min(k2, flat.size)
        order = np.lexsort((jj, ii, flat))[:take]
        W[ii[order], jj[order]] = 1.0
        W[jj[order], ii[order]] = 1.0
    return W


@dataclass
class EmbeddingResult:
    """Projection found by :func:`solve_embedding` plus solver diagnostics."""

    projection: np.ndarray
    eigenvalues: np.ndarray
    max_residual: float
    residual_scale: float
    requested_dim: int
    actual_dim: int
    warnings: list = field(default_factory=list)


def solve_embedding(X, graph: GraphPair, d, ridge=linalg.DEFAULT_RIDGE):
    """Solve the linearized graph-preserving criterion for d directions.

    Builds ``A = X L X^T`` from the intrinsic Laplacian. With an identity
    constraint the criterion is a pure variance form, and the d
    largest-eigenvalue directions of ``A`` are retained (variance-retention
    convention). Otherwise the constraint form ``M = X B X^T`` is built and
    the d smallest generalized eigendirections of ``(A, M)`` are returned,
    orthonormal under the ridged constraint.

    The requested d is clamped to ``min(d, n_features, n_samples - 1)``; a
    clamp is reported in ``result.warnings``, not an error.
    """
    X = linalg._as_matrix(X, "X")
    m, n = X.shape
    if graph.n_samples != n:
        raise DimensionMismatchError(
            f"graph built for {graph.n_samples} samples, data has {n}"
        )
    if d < 1:
        raise ValueError("requested dimension must be >= 1")
    d_max = min(m, n - 1)
    if d_max < 1:
        raise DimensionTooLargeError(
            f"no feasible embedding dimension for {m} features, {n} samples"
        )
    warnings = []
    d_actual = min(d, d_max)
    if d_actual < d:
        warnings.append(f"requested dim {d} clamped to {d_actual} (rank bound)")

    _, L = laplacian(graph.W)
    A = X @ L @ X.T
    A = 0.5 * (A + A.T)

    if graph.has_identity_constraint():
        values, vectors = linalg.sym_eig(A)
        sel = np.arange(values.size - 1, values.size - 1 - d_actual, -1)
        P = vectors[:, sel]
        vals = values[sel]
        residual = A @ P - P * vals[np.newaxis, :]
        max_residual = float(np.max(np.linalg.norm(residual, axis=0)))
        scale = 1.0 + np.linalg.norm(A)
    else:
        M = X @ graph.B @ X.T
        M = 0.5 * (M + M.T)
        values, vectors = linalg.gen_eig(A, M, ridge)
        P = vectors[:, :d_actual]
        vals = values[:d_actual]
        max_residual = linalg.gen_eig_residual(A, M, vals, P, ridge)
        scale = 1.0 + np.linalg.norm(A) + np.linalg.norm(M)

    return EmbeddingResult(
        projection=P,
        eigenvalues=vals,
        max_residual=max_residual,
        residual_scale=scale,
        requested_dim=d,
        actual_dim=d_actual,
        warnings=warnings,
    )
