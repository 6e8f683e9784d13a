"""Cascaded graph-embedding dimensionality reduction with a linear SVM.

The package builds multi-layer projection cascades out of PCA, LDA and MFA
layers, each expressed as a graph-embedding eigenproblem, and benchmarks
them on face-recognition datasets via per-class split protocols.
"""

__version__ = "0.1.0"

from .bench import BenchReport, run_bench, run_eval
from .cascade import (
    CascadeModel,
    CascadeSpec,
    fit_cascade,
    load_model,
    load_model_file,
    parse_pipeline,
    save_model,
    save_model_file,
    transform_cascade,
)
from .classify import (
    SvmModel,
    accuracy,
    nearest_class_mean_fit,
    nearest_class_mean_predict,
    svm_fit,
    svm_predict,
)
from .datasets import (
    Dataset,
    SplitProtocol,
    load_binary,
    load_csv,
    load_dataset,
    save_binary,
    save_csv,
    split,
)
from .graphs import (
    GraphPair,
    LabelSet,
    laplacian,
    lda_graph,
    mfa_intrinsic_graph,
    mfa_penalty_graph,
    pca_graph,
    solve_embedding,
)
from .layers import LayerModel, LayerSpec, fit_layer, transform_layer
from .linalg import center_columns, gen_eig, sym_eig

__all__ = [
    "BenchReport",
    "CascadeModel",
    "CascadeSpec",
    "Dataset",
    "GraphPair",
    "LabelSet",
    "LayerModel",
    "LayerSpec",
    "SplitProtocol",
    "SvmModel",
    "accuracy",
    "center_columns",
    "fit_cascade",
    "fit_layer",
    "gen_eig",
    "laplacian",
    "lda_graph",
    "load_binary",
    "load_csv",
    "load_dataset",
    "load_model",
    "load_model_file",
    "mfa_intrinsic_graph",
    "mfa_penalty_graph",
    "nearest_class_mean_fit",
    "nearest_class_mean_predict",
    "parse_pipeline",
    "pca_graph",
    "run_bench",
    "run_eval",
    "save_binary",
    "save_csv",
    "save_model",
    "save_model_file",
    "solve_embedding",
    "split",
    "svm_fit",
    "svm_predict",
    "sym_eig",
    "transform_cascade",
    "transform_layer",
]
