"""PCA, LDA and MFA exposed as uniform fit/transform projection layers.

Every layer is fitted by building the matching graph pair and handing it to
:func:`genet.graphs.solve_embedding`; the result is a mean vector plus one
projection matrix. Supervised layers (LDA, MFA) whose input dimension
exceeds ``n_samples - 1`` are preceded by an internal full-rank PCA step
(the usual small-sample remedy for singular scatter constraints); the step
is composed into the stored projection, so callers always see a single
matrix.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import graphs, linalg
from .errors import (
    DimensionMismatchError,
    LabelRequiredError,
    SingleClassError,
    TooFewSamplesError,
)

PCA = "PCA"
LDA = "LDA"
MFA = "MFA"
KINDS = (PCA, LDA, MFA)

# Relative eigenvalue cutoff for the internal full-rank PCA step.
_RANK_RTOL = 1e-12


@dataclass(frozen=True)
class LayerSpec:
    """One layer of a cascade: algorithm kind, target dimension, and the
    MFA neighborhood sizes (unset for PCA/LDA)."""

    kind: str
    out_dim: int
    k1: Optional[int] = None
    k2: Optional[int] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown layer kind {self.kind!r}")
        if self.out_dim < 1:
            raise ValueError("out_dim must be >= 1")
        if self.kind == MFA:
            for name, k in (("k1", self.k1), ("k2", self.k2)):
                if k is not None and k < 1:
                    raise ValueError(f"{name} must be >= 1")
        elif self.k1 is not None or self.k2 is not None:
            raise ValueError(f"{self.kind} layers take no k1/k2 parameters")

    @property
    def supervised(self):
        return self.kind in (LDA, MFA)

    def with_neighborhoods(self, k1, k2):
        """Fill missing MFA parameters from run-level defaults."""
        if self.kind != MFA:
            return self
        return LayerSpec(
            kind=self.kind,
            out_dim=self.out_dim,
            k1=self.k1 if self.k1 is not None else k1,
            k2=self.k2 if self.k2 is not None else k2,
        )


@dataclass(frozen=True)
class LayerModel:
    """Fitted layer: training mean, composed projection, and fit diagnostics."""

    spec: LayerSpec
    mean: np.ndarray
    projection: np.ndarray
    out_dim_actual: int
    max_residual: float
    residual_scale: float
    warnings: tuple = field(default=())

    @property
    def in_dim(self):
        return self.mean.size


def _rank_reducing_basis(Xc, n):
    """Orthonormal basis of the centered data span, at most n-1 columns."""
    U, s, _ = np.linalg.svd(Xc, full_matrices=False)
    keep = s * s > _RANK_RTOL * (s[0] * s[0] if s.size else 0.0)
    r = min(int(keep.sum()), n - 1)
    r = max(r, 1)
    return linalg._fix_signs(np.ascontiguousarray(U[:, :r]))


def fit_layer(spec: LayerSpec, X, labels=None, ridge=linalg.DEFAULT_RIDGE):
    """Fit one projection layer on column-sample data.

    Parameters
    ----------
    spec : LayerSpec
    X : (m, n) array, one sample per column.
    labels : LabelSet, required for LDA and MFA.
    ridge : relative ridge for the generalized eigensolver.
    """
    X = linalg._as_matrix(X, "X")
    m, n = X.shape
    if n < 2:
        raise TooFewSamplesError("fitting a layer needs at least 2 samples")
    if spec.supervised:
        if labels is None:
            raise LabelRequiredError(f"{spec.kind} layer requires labels")
        if len(labels) != n:
            raise DimensionMismatchError("label count must match sample count")
        if labels.n_classes < 2:
            raise SingleClassError(f"{spec.kind} layer needs at least 2 classes")
    if spec.kind == MFA and (spec.k1 is None or spec.k2 is None):
        raise ValueError("MFA layer fitted without k1/k2; fill them via the spec")

    fit_warnings = []
    Xc, mean = linalg.center_columns(X)

    pre = None
    Z = Xc
    if spec.supervised and m > n - 1:
        pre = _rank_reducing_basis(Xc, n)
        Z = pre.T @ Xc
        fit_warnings.append(
            f"input dim {m} exceeds sample rank; projected to rank {pre.shape[1]}"
        )

    d = spec.out_dim
    if spec.kind == PCA:
        graph = graphs.pca_graph(n)
    elif spec.kind == LDA:
        graph = graphs.lda_graph(labels)
        cap = labels.n_classes - 1
        if d > cap:
            fit_warnings.append(f"LDA dim {d} clamped to {cap} (classes - 1)")
            d = cap
    else:
        sqdist = graphs.pairwise_sqdist(Z)
        W = graphs.mfa_intrinsic_graph(Z, labels, spec.k1, sqdist=sqdist)
        Wp = graphs.mfa_penalty_graph(Z, labels, spec.k2, sqdist=sqdist)
        _, Lp = graphs.laplacian(Wp)
        graph = graphs.GraphPair(W=W, B=Lp)

    result = graphs.solve_embedding(Z, graph, d, ridge=ridge)
    projection = result.projection if pre is None else pre @ result.projection

    return LayerModel(
        spec=spec,
        mean=mean,
        projection=np.ascontiguousarray(projection),
        out_dim_actual=result.actual_dim,
        max_residual=result.max_residual,
        residual_scale=result.residual_scale,
        warnings=tuple(fit_warnings + result.warnings),
    )


def transform_layer(model: LayerModel, X):
    """Project columns of X: ``Y = P^T (X - mean)``."""
    X = linalg._as_matrix(X, "X")
    if X.shape[0] != model.in_dim:
        raise DimensionMismatchError(
            f"layer expects {model.in_dim}-dim input, got {X.shape[0]}"
        )
    return model.projection.T @ (X - model.mean[:, np.newaxis])
