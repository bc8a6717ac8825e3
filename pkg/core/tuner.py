# -*- coding: utf-8 -*-
"""
Cross-validation and hyperparameter search.

Every fold learns its correlation matrix, kernel bandwidth and model from
its training split only. Folds and grid points run on a thread pool; results
are collected by task index so they never depend on completion order.
"""
import sys
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, TypeVar

import numpy as np
from tqdm import tqdm

from utils import constants
from utils.helpers import atomic_write_text, write_json_file
from utils.logger import log_debug, log_info, is_logging_enabled
from .config import Grid, GridPoint, TrainerConfig
from .correlation import build_collaboration_matrix, learn_correlation_matrix
from .dataset import Dataset, FoldSplit, kfold_split
from .errors import FoldTooSmallError
from .metrics import MetricReport, evaluate_all, format_summary, summarize_reports
from .trainer import fit, labels_from_scores, predict_scores

T = TypeVar("T")

SWEEP_PARAMETERS = ("alpha", "lambda1", "lambda2")


@dataclass(frozen=True)
class FoldRecord:
    fold: int
    n_train: int
    n_test: int
    alpha: float
    lambda1: float
    lambda2: float
    report: MetricReport
    converged: bool
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return {
            "fold": self.fold,
            "n_train": self.n_train,
            "n_test": self.n_test,
            "alpha": self.alpha,
            "lambda1": self.lambda1,
            "lambda2": self.lambda2,
            "converged": self.converged,
            "metrics": self.report.to_dict(),
        }


@dataclass(frozen=True)
class CvResult:
    folds: Tuple[FoldRecord, ...]
    mean: Dict[str, float]
    std: Dict[str, float]
    k: int
    seed: int

    @property
    def converged(self) -> bool:
        return all(f.converged for f in self.folds)

    def to_dict(self) -> dict:
        """Deterministic content only; wall-clock goes to timing_dict()."""
        return {
            "folds": [f.to_dict() for f in self.folds],
            "mean": self.mean,
            "std": self.std,
            "k": self.k,
            "seed": self.seed,
        }

    def timing_dict(self) -> dict:
        return {"seconds": [f.seconds for f in self.folds]}

    def to_text(self) -> str:
        lines = [f"# {self.k}-fold cross-validation, seed {self.seed}"]
        if not self.converged:
            lines.insert(0, "# warning: not converged")
        lines.extend(format_summary(self.mean, self.std))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class GridSearchResult:
    best: GridPoint
    table: Dict[GridPoint, float]
    metric: str
    fits: int

    def to_csv(self) -> str:
        lines = ["alpha,lambda2,score"]
        for point in sorted(self.table, key=GridPoint.sort_key):
            lines.append(f"{point.alpha!r},{point.lambda2!r},{self.table[point]!r}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SweepResult:
    parameter: str
    values: Tuple[float, ...]
    means: Tuple[Dict[str, float], ...]

    def to_csv(self) -> str:
        lines = [",".join((self.parameter,) + constants.METRIC_NAMES)]
        for value, row in zip(self.values, self.means):
            lines.append(",".join([repr(value)] + [repr(row[m]) for m in constants.METRIC_NAMES]))
        return "\n".join(lines) + "\n"


@dataclass
class _Fold:
    index: int
    train: Dataset
    test: Dataset
    s_matrix: Optional[np.ndarray] = None


# --- Execution helpers ---

_progress_enabled = False


def _run_tasks(tasks: Sequence[Callable[[], T]], jobs: int, desc: str) -> List[T]:
    """Runs callables on up to `jobs` threads; results come back in task order."""
    show = is_logging_enabled() and _progress_enabled
    results: List[Optional[T]] = [None] * len(tasks)
    with tqdm(total=len(tasks), desc=desc, file=sys.stderr, disable=not show, leave=False) as bar:
        if jobs <= 1:
            for i, task in enumerate(tasks):
                results[i] = task()
                bar.update(1)
        else:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                futures = {pool.submit(task): i for i, task in enumerate(tasks)}
                for future in as_completed(futures):
                    results[futures[future]] = future.result()
                    bar.update(1)
    return results


def set_progress_enabled(enabled: bool):
    """Shows tqdm progress bars on stderr for fold and grid loops."""
    global _progress_enabled
    _progress_enabled = enabled


def _make_folds(ds: Dataset, k: int, seed: int) -> Tuple[FoldSplit, List[_Fold]]:
    split = kfold_split(ds.n, k, seed)
    folds = []
    for f in range(k):
        train_idx = split.train_indices(f)
        if train_idx.size < 2:
            raise FoldTooSmallError(
                f"fold {f} leaves {train_idx.size} training instance(s); at least 2 are needed (n={ds.n}, k={k})")
        folds.append(_Fold(index=f, train=ds.subset(train_idx), test=ds.subset(split.test_indices(f))))
    return split, folds


def _learn_fold_correlations(folds: List[_Fold], config: TrainerConfig, jobs: int):
    # S depends only on the training labels, so it is shared by every grid point of the fold
    matrices = _run_tasks([lambda fold=fold: learn_correlation_matrix(fold.train.labels, config.admm)[0]
                           for fold in folds], jobs, "correlation")
    for fold, s_matrix in zip(folds, matrices):
        fold.s_matrix = s_matrix


def _evaluate_fold(fold: _Fold, config: TrainerConfig) -> FoldRecord:
    started = time.perf_counter()
    correlation = build_collaboration_matrix(fold.s_matrix, config.alpha)
    model = fit(fold.train, correlation, config)
    scores = predict_scores(model, fold.test.features)
    predictions = labels_from_scores(scores)
    report = evaluate_all(fold.test.labels, scores, predictions)
    return FoldRecord(
        fold=fold.index, n_train=fold.train.n, n_test=fold.test.n,
        alpha=config.alpha, lambda1=config.lambda1, lambda2=config.lambda2,
        report=report, converged=model.diagnostics.converged,
        seconds=time.perf_counter() - started,
    )


def _collect(records: Sequence[FoldRecord], k: int, seed: int) -> CvResult:
    mean, std = summarize_reports([r.report for r in records])
    return CvResult(folds=tuple(records), mean=mean, std=std, k=k, seed=seed)


# --- Public operations ---

def cross_validate(ds: Dataset, point: GridPoint, k: int, seed: int,
                   base_config: Optional[TrainerConfig] = None, jobs: int = 1) -> CvResult:
    """k-fold CV of one hyperparameter setting."""
    config = (base_config or TrainerConfig()).with_point(point)
    _, folds = _make_folds(ds, k, seed)
    _learn_fold_correlations(folds, config, jobs)
    records = _run_tasks([lambda fold=fold: _evaluate_fold(fold, config) for fold in folds], jobs, "folds")
    for r in records:
        log_info(f"Fold {r.fold + 1}/{k}: n_train={r.n_train}, n_test={r.n_test}, "
                 f"average_precision={r.report.average_precision:.4f}")
    return _collect(records, k, seed)


def grid_search(ds: Dataset, grid: Grid, inner_k: int = constants.DEFAULT_INNER_FOLDS,
                metric: str = constants.DEFAULT_SELECTION_METRIC, seed: int = constants.DEFAULT_SEED,
                base_config: Optional[TrainerConfig] = None, jobs: int = 1) -> GridSearchResult:
    """
    Scores every (alpha, lambda2) point by the inner-CV mean of `metric` and
    returns the best one. Ties go to the smaller alpha, then the smaller lambda2.
    """
    points = grid.points()
    if not points:
        raise ValueError("grid is empty")
    if metric not in constants.METRIC_NAMES:
        raise ValueError(f"unknown metric '{metric}'")
    config = (base_config or TrainerConfig()).model_copy(update={"lambda1": grid.lambda1})
    _, folds = _make_folds(ds, inner_k, seed)
    _learn_fold_correlations(folds, config, jobs)

    pairs = [(point, fold) for point in points for fold in folds]
    records = _run_tasks([lambda p=p, f=f: _evaluate_fold(f, config.with_point(p)) for p, f in pairs],
                         jobs, "grid")

    table: Dict[GridPoint, float] = {}
    for i, point in enumerate(points):
        chunk = records[i * inner_k:(i + 1) * inner_k]
        table[point] = float(np.mean([getattr(r.report, metric) for r in chunk]))

    best = select_best(table, metric)
    log_info(f"Grid search over {len(points)} points ({len(records)} fits): best alpha={best.alpha}, "
             f"lambda2={best.lambda2}, {metric}={table[best]:.4f}")
    return GridSearchResult(best=best, table=table, metric=metric, fits=len(records))


def _oriented(value: float, metric: str) -> float:
    if metric in constants.LOWER_IS_BETTER:
        return -value
    if metric in constants.HIGHER_IS_BETTER:
        return value
    raise ValueError(f"unknown metric '{metric}'")


def select_best(table: Dict[GridPoint, float], metric: str) -> GridPoint:
    """Best-scoring point; ties go to the earlier point in tie-break order."""
    ordered = sorted(table, key=GridPoint.sort_key)
    best = ordered[0]
    for point in ordered[1:]:
        if _oriented(table[point], metric) > _oriented(table[best], metric):
            best = point
    return best


def nested_cross_validate(ds: Dataset, grid: Grid, k: int, inner_k: int, metric: str, seed: int,
                          base_config: Optional[TrainerConfig] = None,
                          jobs: int = 1) -> Tuple[CvResult, List[GridSearchResult]]:
    """Outer k-fold CV with a fresh inner grid search on every outer training split."""
    config = (base_config or TrainerConfig()).model_copy(update={"lambda1": grid.lambda1})
    _, folds = _make_folds(ds, k, seed)
    records = []
    searches = []
    for fold in folds:
        search = grid_search(fold.train, grid, inner_k, metric, seed + 1 + fold.index, config, jobs)
        fold.s_matrix = learn_correlation_matrix(fold.train.labels, config.admm, jobs=jobs)[0]
        record = _evaluate_fold(fold, config.with_point(search.best))
        log_info(f"Outer fold {fold.index + 1}/{k}: alpha={search.best.alpha}, lambda2={search.best.lambda2}, "
                 f"{metric}={getattr(record.report, metric):.4f}")
        records.append(record)
        searches.append(search)
    return _collect(records, k, seed), searches


def sensitivity_sweep(ds: Dataset, base_config: TrainerConfig, parameter: str, values: Sequence[float],
                      k: int, seed: int, jobs: int = 1) -> SweepResult:
    """Varies one hyperparameter with the rest fixed; reports the CV mean of every metric per value."""
    if parameter not in SWEEP_PARAMETERS:
        raise ValueError(f"parameter must be one of {', '.join(SWEEP_PARAMETERS)}, got '{parameter}'")
    if not values:
        raise ValueError("no values to sweep")
    configs = [base_config.model_copy(update={parameter: float(v)}) for v in values]
    # validate through the model so out-of-range values fail like any other setting
    configs = [TrainerConfig(**c.model_dump()) for c in configs]

    _, folds = _make_folds(ds, k, seed)
    _learn_fold_correlations(folds, base_config, jobs)
    pairs = [(c, fold) for c in configs for fold in folds]
    records = _run_tasks([lambda c=c, f=f: _evaluate_fold(f, c) for c, f in pairs], jobs, f"sweep {parameter}")

    means = []
    for i, value in enumerate(values):
        mean, _ = summarize_reports([r.report for r in records[i * k:(i + 1) * k]])
        log_debug(f"sweep {parameter}={value}: {mean}")
        means.append(mean)
    return SweepResult(parameter=parameter, values=tuple(float(v) for v in values), means=tuple(means))


# --- Output ---

def write_cv_result(result: CvResult, output_dir: Path, output_format: str = "text") -> List[Path]:
    output_dir = Path(output_dir)
    if output_format == "structured":
        main = write_json_file(output_dir / constants.CV_JSON_NAME, result.to_dict())
    else:
        main = atomic_write_text(output_dir / constants.CV_TEXT_NAME, result.to_text())
    return [main, write_json_file(output_dir / constants.CV_TIMING_NAME, result.timing_dict())]
