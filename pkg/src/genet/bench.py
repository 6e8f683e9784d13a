"""Experiment protocols: single-pipeline evaluation and the benchmark grid.

One evaluation cell = (pipeline, split protocol): for every repeat the
dataset is split per class, the cascade is fitted on the training side, a
linear SVM is trained on the embedded training features, and accuracy is
measured on the embedded test side. Cell seeds are derived deterministically
from the run seed and the cell coordinates, so serial and parallel execution
(or two identical runs) produce identical numbers.

The machine-readable report is JSON with sorted keys. It deliberately
excludes wall-clock times so identical configurations serialize to
byte-identical files; timings are part of the human-readable output only.
"""

import json
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .cascade import fit_cascade, parse_pipeline, transform_cascade
from .classify import accuracy, svm_fit, svm_predict
from .datasets import (
    Dataset,
    SplitProtocol,
    TEST_PER_CLASS,
    TRAIN_PER_CLASS,
    split,
)
from .errors import GenetError

REPORT_FORMAT_VERSION = 1

# The standard benchmark grid: every cascade combination the harness reports.
DEFAULT_PIPELINES = (
    "PCA+MFA+PCA+MFA(100,70,60,40)",
    "PCA+MFA(100,40)",
    "LDA+MFA+LDA+MFA(100,70,60,40)",
    "LDA+MFA(100,40)",
    "LDA+MFA+PCA+MFA(100,70,60,40)",
    "PCA+MFA+LDA+MFA(100,70,60,40)",
    "PCA+MFA+MFA(100,70,40)",
    "LDA+MFA+MFA(100,70,40)",
)

# MFA neighborhood defaults per dataset family, overridable by flags.
_NEIGHBORHOOD_DEFAULTS = (
    ("orl", (10, 500)),
    ("pie", (2, 440)),
    ("pose", (2, 440)),
    ("yale", (10, 500)),
)
FALLBACK_NEIGHBORHOODS = (10, 500)

_SPLIT_DEFAULTS = (
    ("orl", (TRAIN_PER_CLASS, (1, 2, 3, 4, 5))),
    ("pie", (TEST_PER_CLASS, (30, 20, 10))),
    ("pose", (TEST_PER_CLASS, (30, 20, 10))),
    ("yale", (TEST_PER_CLASS, (1,))),
)


def default_neighborhoods(dataset_name):
    """(k1, k2) defaults chosen by dataset name (case-insensitive match)."""
    lowered = dataset_name.lower()
    for key, pair in _NEIGHBORHOOD_DEFAULTS:
        if key in lowered:
            return pair
    return FALLBACK_NEIGHBORHOODS


def default_splits(dataset_name):
    """(mode, sizes) defaults by dataset name, or None if unrecognized."""
    lowered = dataset_name.lower()
    for key, modes in _SPLIT_DEFAULTS:
        if key in lowered:
            return modes
    return None


def derive_seed(*parts):
    """Deterministic child seed from integer coordinates."""
    return int(np.random.SeedSequence(list(parts)).generate_state(1)[0])


@dataclass
class CellResult:
    """Outcome of one (pipeline, split) evaluation."""

    pipeline: str
    split_label: str
    mode: str
    k: int
    repeats: int
    per_repeat: list = field(default_factory=list)
    mean_accuracy: Optional[float] = None
    std_accuracy: Optional[float] = None
    layers: list = field(default_factory=list)
    cascade_warnings: list = field(default_factory=list)
    error: Optional[str] = None
    wall_time: float = 0.0


@dataclass
class BenchReport:
    """Grid of cell results plus a complete echo of the configuration."""

    config: dict
    cells: list
    dataset_name: str
    wall_time: float = 0.0

    @property
    def failed(self):
        return any(cell.error is not None for cell in self.cells)


def split_label(dataset: Dataset, mode, k):
    """Column label: 'k/(n-k)' for uniform train-per-class, else 'Test k'."""
    sizes = dataset.labels.class_sizes
    if mode == TRAIN_PER_CLASS:
        if np.all(sizes == sizes[0]):
            return f"{k}/{int(sizes[0]) - k}"
        return f"Train {k}"
    return f"Test {k}"


def _merge_layer_summaries(summary, report):
    if not summary:
        for entry in report["layers"]:
            summary.append(dict(entry))
        return
    for agg, entry in zip(summary, report["layers"]):
        agg["max_residual"] = max(agg["max_residual"], entry["max_residual"])
        agg["residual_scale"] = max(agg["residual_scale"], entry["residual_scale"])
        for w in entry["warnings"]:
            if w not in agg["warnings"]:
                agg["warnings"].append(w)


def run_cell(dataset: Dataset, pipeline_text, mode, k, k1, k2, svm_cost=1.0,
             seed=0, repeats=10):
    """Evaluate one pipeline on one split protocol over several repeats."""
    started = time.perf_counter()
    cell = CellResult(
        pipeline=pipeline_text,
        split_label=split_label(dataset, mode, k),
        mode=mode,
        k=k,
        repeats=repeats,
    )
    try:
        spec = parse_pipeline(pipeline_text)
        protocol = SplitProtocol(mode=mode, k=k, seed=seed, repeats=repeats)
        for r in range(repeats):
            try:
                train, test = split(dataset, protocol, r)
                model = fit_cascade(spec, train.X, train.labels,
                                    mfa_params=(k1, k2))
                train_feats = transform_cascade(model, train.X)
                test_feats = transform_cascade(model, test.X)
                svm = svm_fit(train_feats, train.labels, cost=svm_cost,
                              seed=derive_seed(seed, r))
                predicted = svm_predict(svm, test_feats)
                cell.per_repeat.append(accuracy(predicted, test.labels.labels))
            except GenetError as exc:
                raise type(exc)(f"repeat {r}: {exc}") from exc
            report = model.fit_report
            _merge_layer_summaries(cell.layers, report)
            for w in report["warnings"]:
                if w not in cell.cascade_warnings:
                    cell.cascade_warnings.append(w)
        cell.mean_accuracy = float(np.mean(cell.per_repeat))
        cell.std_accuracy = float(np.std(cell.per_repeat))
    except GenetError as exc:
        cell.error = f"{type(exc).__name__}: {exc}"
    cell.wall_time = time.perf_counter() - started
    return cell


def run_eval(dataset: Dataset, pipeline_text, mode, k, k1=None, k2=None,
             svm_cost=1.0, seed=0, repeats=10, config_extra=None):
    """Single-pipeline evaluation wrapped as a one-cell report."""
    if k1 is None or k2 is None:
        dk1, dk2 = default_neighborhoods(dataset.name)
        k1 = dk1 if k1 is None else k1
        k2 = dk2 if k2 is None else k2
    started = time.perf_counter()
    cell = run_cell(dataset, pipeline_text, mode, k, k1, k2,
                    svm_cost=svm_cost, seed=seed, repeats=repeats)
    config = {
        "dataset_name": dataset.name,
        "pipelines": [pipeline_text],
        "splits": [{"mode": mode, "k": k}],
        "k1": k1,
        "k2": k2,
        "svm_cost": svm_cost,
        "seed": seed,
        "repeats": repeats,
    }
    if config_extra:
        config.update(config_extra)
    return BenchReport(config=config, cells=[cell], dataset_name=dataset.name,
                       wall_time=time.perf_counter() - started)


def run_bench(dataset: Dataset, pipelines=None, mode=None, sizes=None,
              k1=None, k2=None, svm_cost=1.0, seed=0, repeats=10,
              config_extra=None):
    """Full benchmark grid: rows = pipelines, columns = split sizes.

    Defaults (pipelines, split protocol, k1/k2) follow the dataset name.
    A failing cell is recorded in place and the rest of the grid continues.
    """
    pipelines = list(pipelines) if pipelines else list(DEFAULT_PIPELINES)
    if mode is None or sizes is None:
        defaults = default_splits(dataset.name)
        if defaults is None:
            raise ValueError(
                f"no split defaults for dataset {dataset.name!r}; pass an"
                " explicit train-per-class or test-per-class size list"
            )
        mode = defaults[0] if mode is None else mode
        sizes = defaults[1] if sizes is None else sizes
    sizes = list(sizes)
    if k1 is None or k2 is None:
        dk1, dk2 = default_neighborhoods(dataset.name)
        k1 = dk1 if k1 is None else k1
        k2 = dk2 if k2 is None else k2

    started = time.perf_counter()
    cells = []
    for pi, pipeline_text in enumerate(pipelines):
        for si, k in enumerate(sizes):
            cell_seed = derive_seed(seed, pi, si)
            cells.append(
                run_cell(dataset, pipeline_text, mode, k, k1, k2,
                         svm_cost=svm_cost, seed=cell_seed, repeats=repeats)
            )
    config = {
        "dataset_name": dataset.name,
        "pipelines": pipelines,
        "splits": [{"mode": mode, "k": k} for k in sizes],
        "k1": k1,
        "k2": k2,
        "svm_cost": svm_cost,
        "seed": seed,
        "repeats": repeats,
    }
    if config_extra:
        config.update(config_extra)
    return BenchReport(config=config, cells=cells, dataset_name=dataset.name,
                       wall_time=time.perf_counter() - started)


def report_to_dict(report: BenchReport):
    """Canonical machine-readable structure (no wall-clock values)."""
    cells = []
    for cell in report.cells:
        cells.append(
            {
                "pipeline": cell.pipeline,
                "split": cell.split_label,
                "mode": cell.mode,
                "k": cell.k,
                "repeats": cell.repeats,
                "per_repeat_accuracy": cell.per_repeat,
                "mean_accuracy": cell.mean_accuracy,
                "std_accuracy": cell.std_accuracy,
                "layers": cell.layers,
                "cascade_warnings": cell.cascade_warnings,
                "error": cell.error,
            }
        )
    return {
        "format_version": REPORT_FORMAT_VERSION,
        "config": report.config,
        "cells": cells,
    }


def report_to_json(report: BenchReport):
    """Deterministic JSON: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(report_to_dict(report), sort_keys=True, indent=2) + "\n"


def report_to_tsv(report: BenchReport):
    """Delimited accuracy grid: one row per pipeline, one column per split."""
    columns = []
    for cell in report.cells:
        if cell.split_label not in columns:
            columns.append(cell.split_label)
    rows = []
    for cell in report.cells:
        if not rows or rows[-1][0] != cell.pipeline:
            rows.append([cell.pipeline] + [""] * len(columns))
        value = "ERROR" if cell.error else f"{cell.mean_accuracy:.6f}"
        rows[-1][1 + columns.index(cell.split_label)] = value
    lines = ["\t".join(["pipeline"] + columns)]
    lines.extend("\t".join(row) for row in rows)
    return "\n".join(lines) + "\n"


def format_table(report: BenchReport):
    """Human-readable accuracy table (percent) with per-cell timings."""
    columns = []
    for cell in report.cells:
        if cell.split_label not in columns:
            columns.append(cell.split_label)
    by_row = {}
    order = []
    for cell in report.cells:
        if cell.pipeline not in by_row:
            by_row[cell.pipeline] = {}
            order.append(cell.pipeline)
        by_row[cell.pipeline][cell.split_label] = cell

    name_width = max(len("pipeline"), max(len(p) for p in order))
    col_width = max(8, max(len(c) for c in columns) + 2)
    lines = [
        f"dataset: {report.dataset_name}  k1={report.config['k1']}"
        f" k2={report.config['k2']} cost={report.config['svm_cost']}"
        f" seed={report.config['seed']} repeats={report.config['repeats']}"
    ]
    header = "pipeline".ljust(name_width) + "".join(c.rjust(col_width) for c in columns)
    lines.append(header)
    for pipeline in order:
        row = pipeline.ljust(name_width)
        for c in columns:
            cell = by_row[pipeline].get(c)
            if cell is None:
                row += "-".rjust(col_width)
            elif cell.error:
                row += "ERR".rjust(col_width)
            else:
                row += f"{100.0 * cell.mean_accuracy:.2f}%".rjust(col_width)
        lines.append(row)
    total = sum(cell.wall_time for cell in report.cells)
    lines.append(f"total wall time: {total:.2f}s over {len(report.cells)} cell(s)")
    errors = [c for c in report.cells if c.error]
    for cell in errors:
        lines.append(f"ERROR [{cell.pipeline} @ {cell.split_label}]: {cell.error}")
    return "\n".join(lines) + "\n"
