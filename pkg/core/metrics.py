# -*- coding: utf-8 -*-
"""
The seven multi-label evaluation metrics.

Ranks come from a stable sort of descending scores, so equal scores are
ranked by lowest label index (rank 1 = highest score). Ranking metrics skip
instances on which they are undefined; a metric with no valid instance at
all raises MetricDomainError.
"""
from typing import Dict, List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from utils.constants import FLOAT_FORMAT, METRIC_NAMES
from .errors import DimensionMismatchError, MetricDomainError


class MetricReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    one_error: float = Field(ge=0, le=1)
    hamming_loss: float = Field(ge=0, le=1)
    coverage: float = Field(ge=0, le=1)
    ranking_loss: float = Field(ge=0, le=1)
    average_precision: float = Field(ge=0, le=1)
    macro_f1: float = Field(ge=0, le=1)
    micro_f1: float = Field(ge=0, le=1)
    skipped: Dict[str, int] = Field(default_factory=dict)

    def values(self) -> Dict[str, float]:
        return {name: getattr(self, name) for name in METRIC_NAMES}

    def to_text(self) -> str:
        lines = [f"{name}={FLOAT_FORMAT % value}" for name, value in self.values().items()]
        lines.extend(f"skipped.{name}={self.skipped.get(name, 0)}" for name in METRIC_NAMES)
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {**self.values(), "skipped": {name: self.skipped.get(name, 0) for name in METRIC_NAMES}}


# --- Shared helpers ---

def _as_matrix(name: str, values) -> np.ndarray:
    matrix = np.asarray(values, dtype=float)
    if matrix.ndim != 2:
        raise DimensionMismatchError(f"{name} must be a 2-D matrix, got {matrix.ndim}-D")
    return matrix


def _check_pair(truth, other, other_name: str) -> Tuple[np.ndarray, np.ndarray]:
    truth = _as_matrix("truth", truth)
    other = _as_matrix(other_name, other)
    if truth.shape != other.shape:
        raise DimensionMismatchError(f"truth has shape {truth.shape}, {other_name} has shape {other.shape}")
    return truth, other


def label_ranks(scores: np.ndarray) -> np.ndarray:
    """Per-row ranks (1 = highest score, ties to the lower label index)."""
    order = np.argsort(-scores, axis=1, kind="stable")
    ranks = np.empty_like(order)
    rows = np.arange(scores.shape[0])[:, np.newaxis]
    ranks[rows, order] = np.arange(1, scores.shape[1] + 1)
    return ranks


def _require(valid: int, metric: str):
    if valid == 0:
        raise MetricDomainError(f"{metric} is undefined: no instance qualifies")


# --- Ranking metrics (truth, scores) ---

def _one_error(truth, scores) -> Tuple[float, int]:
    truth, scores = _check_pair(truth, scores, "scores")
    relevant = truth > 0
    valid = relevant.any(axis=1)
    _require(int(valid.sum()), "one_error")
    top = np.argsort(-scores, axis=1, kind="stable")[:, 0]
    misses = ~relevant[np.arange(truth.shape[0]), top]
    return float(misses[valid].mean()), int((~valid).sum())


def _coverage(truth, scores) -> Tuple[float, int]:
    truth, scores = _check_pair(truth, scores, "scores")
    relevant = truth > 0
    valid = relevant.any(axis=1)
    _require(int(valid.sum()), "coverage")
    ranks = label_ranks(scores)
    deepest = np.where(relevant, ranks, 0).max(axis=1)
    return float(((deepest[valid] - 1) / truth.shape[1]).mean()), int((~valid).sum())


def _ranking_loss(truth, scores) -> Tuple[float, int]:
    truth, scores = _check_pair(truth, scores, "scores")
    relevant = truth > 0
    n_rel = relevant.sum(axis=1)
    q = truth.shape[1]
    valid = (n_rel > 0) & (n_rel < q)
    _require(int(valid.sum()), "ranking_loss")
    losses = []
    for i in np.flatnonzero(valid):
        rel_scores = scores[i, relevant[i]][:, np.newaxis]
        irr_scores = scores[i, ~relevant[i]][np.newaxis, :]
        bad = (rel_scores < irr_scores).sum() + 0.5 * (rel_scores == irr_scores).sum()
        losses.append(bad / (rel_scores.size * irr_scores.size))
    return float(np.mean(losses)), int((~valid).sum())


def _average_precision(truth, scores) -> Tuple[float, int]:
    truth, scores = _check_pair(truth, scores, "scores")
    relevant = truth > 0
    valid = relevant.any(axis=1)
    _require(int(valid.sum()), "average_precision")
    ranks = label_ranks(scores)
    precisions = []
    for i in np.flatnonzero(valid):
        rel_ranks = np.sort(ranks[i, relevant[i]])
        # the k-th best relevant label has exactly k relevant labels at or above it
        precisions.append(float(np.mean(np.arange(1, rel_ranks.size + 1) / rel_ranks)))
    return float(np.mean(precisions)), int((~valid).sum())


def one_error(truth, scores) -> float:
    return _one_error(truth, scores)[0]


def coverage(truth, scores) -> float:
    """Mean (deepest relevant rank - 1) / q."""
    return _coverage(truth, scores)[0]


def ranking_loss(truth, scores) -> float:
    return _ranking_loss(truth, scores)[0]


def average_precision(truth, scores) -> float:
    return _average_precision(truth, scores)[0]


# --- Classification metrics (truth, predictions) ---

def hamming_loss(truth, predictions) -> float:
    truth, predictions = _check_pair(truth, predictions, "predictions")
    _require(truth.size, "hamming_loss")
    return float(np.mean((truth > 0) != (predictions > 0)))


def _confusion(truth, predictions) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    truth, predictions = _check_pair(truth, predictions, "predictions")
    _require(truth.shape[0], "f1")
    actual = truth > 0
    predicted = predictions > 0
    tp = (actual & predicted).sum(axis=0)
    fp = (~actual & predicted).sum(axis=0)
    fn = (actual & ~predicted).sum(axis=0)
    return tp, fp, fn


def _f1(tp, fp, fn) -> np.ndarray:
    tp, fp, fn = (np.asarray(v, dtype=float) for v in (tp, fp, fn))
    denominator = 2 * tp + fp + fn
    return np.divide(2 * tp, denominator, out=np.zeros_like(denominator), where=denominator > 0)


def macro_f1(truth, predictions) -> float:
    tp, fp, fn = _confusion(truth, predictions)
    return float(np.mean(_f1(tp, fp, fn)))


def micro_f1(truth, predictions) -> float:
    tp, fp, fn = _confusion(truth, predictions)
    return float(_f1(tp.sum(), fp.sum(), fn.sum()))


# --- Aggregation ---

def evaluate_all(truth, scores, predictions) -> MetricReport:
    truth, scores = _check_pair(truth, scores, "scores")
    _check_pair(truth, predictions, "predictions")
    if not np.all(np.isin(truth, (-1.0, 1.0))):
        raise ValueError("truth labels must be encoded as -1/+1")

    values: Dict[str, float] = {}
    skipped: Dict[str, int] = {}
    for name, func in (("one_error", _one_error), ("coverage", _coverage),
                       ("ranking_loss", _ranking_loss), ("average_precision", _average_precision)):
        values[name], skipped[name] = func(truth, scores)
    values["hamming_loss"] = hamming_loss(truth, predictions)
    values["macro_f1"] = macro_f1(truth, predictions)
    values["micro_f1"] = micro_f1(truth, predictions)
    for name in ("hamming_loss", "macro_f1", "micro_f1"):
        skipped[name] = 0
    return MetricReport(**values, skipped=skipped)


def summarize_reports(reports: Sequence[MetricReport]) -> Tuple[Dict[str, float], Dict[str, float]]:
    """Mean and population standard deviation (denominator k) of every metric."""
    if not reports:
        raise ValueError("no reports to summarize")
    table = np.array([[r.values()[name] for name in METRIC_NAMES] for r in reports])
    means = table.mean(axis=0)
    stds = table.std(axis=0)
    return dict(zip(METRIC_NAMES, means.tolist())), dict(zip(METRIC_NAMES, stds.tolist()))


def format_summary(means: Dict[str, float], stds: Dict[str, float]) -> List[str]:
    return [f"{name} {means[name]:.4f}±{stds[name]:.4f}" for name in METRIC_NAMES]
