# -*- coding: utf-8 -*-
import os
import tempfile

# Keep settings and log files out of the source tree; must run before utils.constants is imported.
os.environ.setdefault("COLLABEL_DATA_DIR", tempfile.mkdtemp(prefix="collabel-test-"))

import numpy as np
import pytest

from core.dataset import Dataset


def random_labels(rng: np.random.Generator, n: int, q: int) -> np.ndarray:
    """Random -1/+1 matrix in which every row has at least one and at most q-1 relevant labels."""
    labels = np.where(rng.random((n, q)) < 0.4, 1.0, -1.0)
    for i in range(n):
        if np.all(labels[i] < 0):
            labels[i, rng.integers(q)] = 1.0
        if np.all(labels[i] > 0):
            labels[i, rng.integers(q)] = -1.0
    return labels


def separable_dataset(rng: np.random.Generator, n: int = 60, q: int = 4, d: int = 3,
                      spread: float = 0.15) -> Dataset:
    """
    Instances drawn around one of q well separated centres; the label set of a
    cluster is label c and label (c+1) mod q, so every row has two relevant labels.
    """
    centres = 5.0 * np.eye(q, d) if d >= q else 5.0 * rng.standard_normal((q, d))
    clusters = np.arange(n) % q
    features = centres[clusters] + spread * rng.standard_normal((n, d))
    labels = -np.ones((n, q))
    labels[np.arange(n), clusters] = 1.0
    labels[np.arange(n), (clusters + 1) % q] = 1.0
    return Dataset(features, labels)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def small_dataset(rng):
    features = rng.standard_normal((12, 3))
    return Dataset(features, random_labels(rng, 12, 4))


@pytest.fixture
def separable(rng):
    return separable_dataset(rng, n=60, q=4, d=4)
