# -*- coding: utf-8 -*-
import json
import os
from pathlib import Path

import numpy as np
import pytest

import core.tuner as tuner
from core.config import Grid, GridPoint, TrainerConfig
from core.dataset import Dataset, kfold_split, load_dataset
from core.errors import FoldTooSmallError
from core.tuner import (cross_validate, grid_search, nested_cross_validate, select_best, sensitivity_sweep,
                        write_cv_result)
from tests.conftest import separable_dataset
from utils import constants

POINT = GridPoint(alpha=0.0, lambda2=0.1)


@pytest.fixture
def unbalanced(rng):
    """Four clusters whose label frequencies differ, so a constant predictor makes mistakes."""
    n = 48
    clusters = np.arange(n) % 4
    features = 5.0 * np.eye(4)[clusters] + 0.15 * rng.standard_normal((n, 4))
    label_sets = [(0, 2), (0, 3), (0,), (1, 2)]
    labels = -np.ones((n, 4))
    for i, c in enumerate(clusters):
        labels[i, list(label_sets[c])] = 1.0
    return Dataset(features, labels)


# --- cross_validate ---

def test_separable_data_ranks_almost_perfectly(separable):
    result = cross_validate(separable, POINT, k=5, seed=0)
    assert result.mean["average_precision"] >= 0.99
    assert len(result.folds) == 5
    assert sum(f.n_test for f in result.folds) == separable.n


def test_cross_validation_is_deterministic(separable):
    a = cross_validate(separable, GridPoint(alpha=0.3, lambda2=0.1), k=4, seed=9)
    b = cross_validate(separable, GridPoint(alpha=0.3, lambda2=0.1), k=4, seed=9)
    assert a.to_dict() == b.to_dict()


def test_parallel_folds_match_serial(separable):
    serial = cross_validate(separable, POINT, k=4, seed=1, jobs=1)
    parallel = cross_validate(separable, POINT, k=4, seed=1, jobs=2)
    assert serial.to_dict() == parallel.to_dict()


def test_fold_too_small():
    rng = np.random.default_rng(0)
    ds = Dataset(rng.standard_normal((3, 2)), np.array([[1, -1], [-1, 1], [1, -1]], dtype=float))
    with pytest.raises(FoldTooSmallError):
        cross_validate(ds, POINT, k=2, seed=0)


def test_training_never_sees_test_rows(separable, monkeypatch):
    seen = []
    original_fit = tuner.fit

    def recording_fit(train, correlation, config):
        seen.append(np.array(train.features))
        return original_fit(train, correlation, config)

    monkeypatch.setattr(tuner, "fit", recording_fit)
    cross_validate(separable, POINT, k=3, seed=5)
    split = kfold_split(separable.n, 3, seed=5)
    for f, features in enumerate(seen):
        np.testing.assert_array_equal(features, separable.features[split.train_indices(f)])


def test_test_rows_do_not_influence_their_fold(separable):
    split = kfold_split(separable.n, 3, seed=2)
    test_idx = split.test_indices(0)
    noisy_features = np.array(separable.features)
    noisy_features[test_idx] = np.random.default_rng(1).standard_normal((test_idx.size, separable.d))
    noisy = Dataset(noisy_features, separable.labels)
    clean_folds = tuner._make_folds(separable, 3, 2)[1]
    noisy_folds = tuner._make_folds(noisy, 3, 2)[1]
    config = TrainerConfig().with_point(POINT)
    tuner._learn_fold_correlations(clean_folds, config, 1)
    tuner._learn_fold_correlations(noisy_folds, config, 1)
    assert np.array_equal(clean_folds[0].s_matrix, noisy_folds[0].s_matrix)
    clean = tuner.fit(clean_folds[0].train, tuner.build_collaboration_matrix(clean_folds[0].s_matrix, 0.0), config)
    dirty = tuner.fit(noisy_folds[0].train, tuner.build_collaboration_matrix(noisy_folds[0].s_matrix, 0.0), config)
    assert clean.kernel.bandwidth == dirty.kernel.bandwidth
    assert np.array_equal(clean.dual_coeffs, dirty.dual_coeffs)


def test_text_result_warns_when_not_converged(separable):
    result = cross_validate(separable, POINT, k=3, seed=0, base_config=TrainerConfig(max_outer_iter=1))
    assert not result.converged
    assert result.to_text().startswith("# warning: not converged")


# --- grid search ---

def test_single_point_grid(separable):
    grid = Grid(alphas=[0.2], lambda2s=[0.1])
    result = grid_search(separable, grid, inner_k=3, seed=0)
    assert result.best == GridPoint(alpha=0.2, lambda2=0.1)
    assert result.fits == 3


def test_fit_count_is_grid_size_times_inner_folds(separable):
    grid = Grid(alphas=[0.0, 0.5], lambda2s=[0.1, 1.0, 10.0])
    result = grid_search(separable, grid, inner_k=2, seed=0)
    assert result.fits == 12
    assert len(result.table) == 6


def test_dominant_point_wins_for_lower_is_better_metric(unbalanced):
    # a huge lambda2 collapses the model to its bias, which is wrong for every minority entry
    grid = Grid(alphas=[0.0], lambda2s=[0.1, 1e6])
    result = grid_search(unbalanced, grid, inner_k=3, metric="hamming_loss", seed=0)
    good, bad = GridPoint(alpha=0.0, lambda2=0.1), GridPoint(alpha=0.0, lambda2=1e6)
    assert result.table[good] < result.table[bad]
    assert result.best == good


def test_select_best_prefers_smaller_alpha_then_lambda2():
    table = {
        GridPoint(alpha=0.5, lambda2=0.1): 0.9,
        GridPoint(alpha=0.2, lambda2=1.0): 0.9,
        GridPoint(alpha=0.2, lambda2=0.5): 0.9,
        GridPoint(alpha=0.7, lambda2=0.1): 0.8,
    }
    assert select_best(table, "average_precision") == GridPoint(alpha=0.2, lambda2=0.5)


def test_select_best_respects_metric_direction():
    table = {GridPoint(alpha=0.0, lambda2=0.1): 0.3, GridPoint(alpha=0.1, lambda2=0.1): 0.2}
    assert select_best(table, "ranking_loss") == GridPoint(alpha=0.1, lambda2=0.1)
    assert select_best(table, "micro_f1") == GridPoint(alpha=0.0, lambda2=0.1)


def test_unknown_metric_rejected(separable):
    with pytest.raises(ValueError):
        grid_search(separable, Grid(alphas=[0.0], lambda2s=[0.1]), inner_k=2, metric="accuracy")


def test_grid_csv_is_sorted(separable):
    result = grid_search(separable, Grid(alphas=[0.4, 0.0], lambda2s=[1.0, 0.1]), inner_k=2, seed=3)
    rows = result.to_csv().splitlines()
    assert rows[0] == "alpha,lambda2,score"
    assert [r.split(",")[:2] for r in rows[1:]] == [["0.0", "0.1"], ["0.0", "1.0"], ["0.4", "0.1"], ["0.4", "1.0"]]


# --- nested cross-validation ---

def test_nested_cv_records_chosen_parameters(separable):
    grid = Grid(alphas=[0.0, 0.3], lambda2s=[0.1])
    result, searches = nested_cross_validate(separable, grid, k=3, inner_k=2, metric="average_precision", seed=4)
    assert len(searches) == 3
    for record, search in zip(result.folds, searches):
        assert (record.alpha, record.lambda2) == (search.best.alpha, search.best.lambda2)
        assert record.lambda1 == grid.lambda1
    assert result.mean["average_precision"] >= 0.95


# --- sensitivity sweep ---

def test_sweep_one_row_per_value(separable):
    sweep = sensitivity_sweep(separable, TrainerConfig(alpha=0.0), "lambda1", [0.5, 1.0, 2.0], k=3, seed=0)
    rows = sweep.to_csv().splitlines()
    assert rows[0] == "lambda1," + ",".join(constants.METRIC_NAMES)
    assert [r.split(",")[0] for r in rows[1:]] == ["0.5", "1.0", "2.0"]
    assert len(sweep.means) == 3


def test_sweep_rejects_unknown_parameter(separable):
    with pytest.raises(ValueError):
        sensitivity_sweep(separable, TrainerConfig(), "rho", [1.0], k=3, seed=0)


def test_sweep_rejects_out_of_range_value(separable):
    with pytest.raises(ValueError):
        sensitivity_sweep(separable, TrainerConfig(), "alpha", [0.5, 1.5], k=3, seed=0)


# --- output ---

def test_written_results_are_reproducible(tmp_path, rng):
    ds = separable_dataset(rng, n=24, q=3, d=3)
    first = write_cv_result(cross_validate(ds, POINT, k=3, seed=7), tmp_path / "a", "structured")
    second = write_cv_result(cross_validate(ds, POINT, k=3, seed=7), tmp_path / "b", "structured")
    assert [p.name for p in first] == [constants.CV_JSON_NAME, constants.CV_TIMING_NAME]
    assert first[0].read_bytes() == second[0].read_bytes()
    data = json.loads(first[0].read_text(encoding="utf-8"))
    assert data["k"] == 3 and data["seed"] == 7
    assert "seconds" not in data["folds"][0]
    assert len(json.loads(first[1].read_text(encoding="utf-8"))["seconds"]) == 3


def test_text_result_layout(tmp_path, rng):
    ds = separable_dataset(rng, n=24, q=3, d=3)
    paths = write_cv_result(cross_validate(ds, POINT, k=3, seed=7), tmp_path, "text")
    lines = paths[0].read_text(encoding="utf-8").splitlines()
    assert lines[0] == "# 3-fold cross-validation, seed 7"
    assert [line.split(" ")[0] for line in lines[1:]] == list(constants.METRIC_NAMES)


EMOTIONS_DIR = os.environ.get("COLLABEL_EMOTIONS_DIR")


@pytest.mark.skipif(not EMOTIONS_DIR, reason="COLLABEL_EMOTIONS_DIR not set")
def test_emotions_nested_cv_in_published_range():
    base = Path(EMOTIONS_DIR)
    ds = load_dataset(base / "features.txt", base / "labels.txt")
    result, _ = nested_cross_validate(ds, Grid(), k=10, inner_k=5, metric="average_precision", seed=0, jobs=4)
    assert 0.17 <= result.mean["hamming_loss"] <= 0.24
    assert 0.74 <= result.mean["average_precision"] <= 0.83
