# -*- coding: utf-8 -*-
"""
Multi-label datasets: loading, validation, encoding and fold assignment.

Features are used exactly as read; no normalization is applied before the
Gaussian kernel.
"""
import re
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from utils.constants import FLOAT_FORMAT, LABELS_HEADER
from utils.helpers import atomic_write_text, format_matrix
from utils.logger import log_debug, log_info, log_warning
from .errors import DataFormatError, DimensionMismatchError

# one comma (optionally padded) or a run of whitespace; "1,,2" keeps its empty field
_FIELD_SPLIT = re.compile(r"\s*,\s*|\s+")
_LABEL_NAME = re.compile(r"[^,\s]+")
_LABEL_VALUES = {0.0: -1.0, -1.0: -1.0, 1.0: 1.0}


def _freeze(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float, copy=True)
    array.setflags(write=False)
    return array


def check_label_name(name: str, path: Optional[Path] = None, line: Optional[int] = None):
    """Names are non-empty and free of commas and whitespace."""
    if not isinstance(name, str) or not _LABEL_NAME.fullmatch(name):
        raise DataFormatError(f"invalid label name '{name}': names must be non-empty without commas or whitespace",
                              path=str(path) if path is not None else None, line=line)


@dataclass(frozen=True)
class Dataset:
    """Instance matrix X (n x d) and label matrix Y (n x q) with entries in {-1, +1}."""
    features: np.ndarray
    labels: np.ndarray
    names: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        features = np.asarray(self.features, dtype=float)
        labels = np.asarray(self.labels, dtype=float)
        if features.ndim != 2 or labels.ndim != 2:
            raise DataFormatError("features and labels must be 2-D matrices")
        if features.shape[0] != labels.shape[0]:
            raise DimensionMismatchError(
                f"features have {features.shape[0]} rows but labels have {labels.shape[0]}")
        if features.shape[0] < 1:
            raise DataFormatError("dataset has no instances")
        if features.shape[1] < 1:
            raise DataFormatError("dataset has no features")
        if labels.shape[1] < 2:
            raise DataFormatError(f"need at least 2 labels, got {labels.shape[1]}")
        if not np.all(np.isfinite(features)):
            raise DataFormatError("features contain NaN or infinite values")
        if not np.all(np.isin(labels, (-1.0, 1.0))):
            raise DataFormatError("labels must be encoded as -1/+1")
        if self.names is not None:
            names = tuple(self.names)
            for name in names:
                check_label_name(name)
            if len(names) != labels.shape[1]:
                raise DimensionMismatchError(f"{len(names)} label names for {labels.shape[1]} labels")
            object.__setattr__(self, "names", names)
        object.__setattr__(self, "features", _freeze(features))
        object.__setattr__(self, "labels", _freeze(labels))

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    @property
    def q(self) -> int:
        return self.labels.shape[1]

    def subset(self, indices: Sequence[int]) -> "Dataset":
        idx = np.asarray(indices, dtype=int)
        return Dataset(self.features[idx], self.labels[idx], self.names)


@dataclass(frozen=True)
class FoldSplit:
    fold_count: int
    assignments: np.ndarray
    seed: int

    def test_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == fold)

    def train_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments != fold)

    def fold_sizes(self) -> List[int]:
        return np.bincount(self.assignments, minlength=self.fold_count).tolist()


@dataclass(frozen=True)
class DatasetSummary:
    n: int
    d: int
    q: int
    cardinality: float
    density: float
    distinct_label_sets: int
    feature_type: str

    def to_dict(self) -> dict:
        return dict(self.__dict__)


# --- Parsing ---

def _read_rows(path: Path, allow_labels_header: bool = False) -> Tuple[List[Tuple[int, List[str]]], Optional[List[str]]]:
    """Splits a text file into (line number, tokens) rows, skipping blank lines."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise DataFormatError("file not found", path=str(path)) from None
    except UnicodeDecodeError as e:
        raise DataFormatError(f"not UTF-8 text ({e.reason})", path=str(path)) from None

    names = None
    rows = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if allow_labels_header and not rows and names is None and line.startswith(LABELS_HEADER):
                names = [n.strip() for n in line[len(LABELS_HEADER):].split(",")]
                for name in names:
                    check_label_name(name, path, line_no)
                continue
            raise DataFormatError(f"unexpected header line '{line[:40]}'", path=str(path), line=line_no)
        rows.append((line_no, _FIELD_SPLIT.split(line)))
    if not rows:
        raise DataFormatError("file is empty", path=str(path))
    return rows, names


def _rows_to_matrix(path: Path, rows: List[Tuple[int, List[str]]]) -> np.ndarray:
    width = len(rows[0][1])
    values = np.empty((len(rows), width), dtype=float)
    for r, (line_no, tokens) in enumerate(rows):
        if len(tokens) != width:
            raise DimensionMismatchError(
                f"expected {width} fields, found {len(tokens)}", path=str(path), line=line_no)
        for c, token in enumerate(tokens):
            if not token:
                raise DataFormatError(f"empty field in column {c + 1}", path=str(path), line=line_no)
            try:
                values[r, c] = float(token)
            except ValueError:
                raise DataFormatError(f"non-numeric token '{token}'", path=str(path), line=line_no) from None
    return values


def load_matrix(path: Path) -> np.ndarray:
    """Reads a real matrix in the feature-file format."""
    rows, _ = _read_rows(path)
    matrix = _rows_to_matrix(path, rows)
    if not np.all(np.isfinite(matrix)):
        raise DataFormatError("matrix contains NaN or infinite values", path=str(path))
    return matrix


def load_labels(path: Path) -> Tuple[np.ndarray, Optional[List[str]]]:
    """Reads a label file, mapping {0,1} or {-1,+1} to {-1,+1}. Returns (labels, names)."""
    rows, names = _read_rows(path, allow_labels_header=True)
    raw = _rows_to_matrix(path, rows)
    encoded = np.empty_like(raw)
    for (line_no, tokens), r in zip(rows, range(raw.shape[0])):
        for c, value in enumerate(raw[r]):
            mapped = _LABEL_VALUES.get(float(value))
            if mapped is None:
                raise DataFormatError(f"label token '{tokens[c]}' is not one of 0, 1, -1, +1",
                                      path=str(path), line=line_no)
            encoded[r, c] = mapped
    if names is not None and len(names) != encoded.shape[1]:
        raise DimensionMismatchError(
            f"#labels header names {len(names)} labels but rows have {encoded.shape[1]}", path=str(path))
    return encoded, names


def load_dataset(features_path: Path, labels_path: Path) -> Dataset:
    features = load_matrix(features_path)
    labels, names = load_labels(labels_path)
    if features.shape[0] != labels.shape[0]:
        raise DimensionMismatchError(
            f"{features_path} has {features.shape[0]} rows but {labels_path} has {labels.shape[0]}")
    ds = Dataset(features, labels, tuple(names) if names else None)
    log_info(f"Loaded dataset n={ds.n}, d={ds.d}, q={ds.q} from {features_path} / {labels_path}")
    return ds


def write_dataset(ds: Dataset, features_path: Path, labels_path: Path) -> None:
    """Writes ds in the documented text format; load_dataset reproduces it bit-exactly."""
    atomic_write_text(Path(features_path), format_matrix(ds.features, fmt=FLOAT_FORMAT))
    header = f"{LABELS_HEADER} {','.join(ds.names)}" if ds.names else None
    atomic_write_text(Path(labels_path), format_matrix(ds.labels.astype(int), fmt="%d", header=header))


# --- Folds ---

def kfold_split(n: int, k: int, seed: int) -> FoldSplit:
    """Uniformly shuffled k-fold assignment; deterministic in (n, k, seed)."""
    if k <= 1 or k > n:
        raise ValueError(f"fold count must satisfy 1 < k <= n (k={k}, n={n})")
    if seed < 0:
        raise ValueError(f"seed must be a non-negative integer, got {seed}")
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    assignments = np.empty(n, dtype=int)
    assignments[order] = np.arange(n) % k
    assignments.setflags(write=False)
    log_debug(f"kfold_split n={n} k={k} seed={seed}")
    return FoldSplit(fold_count=k, assignments=assignments, seed=seed)


def describe(ds: Dataset) -> DatasetSummary:
    positives = (ds.labels > 0).sum(axis=1)
    cardinality = float(positives.mean())
    distinct = len({row.tobytes() for row in (ds.labels > 0)})
    nominal = bool(np.all(np.isin(ds.features, (0.0, 1.0))))
    if cardinality == 0:
        log_warning("Dataset has no positive labels at all.")
    return DatasetSummary(
        n=ds.n, d=ds.d, q=ds.q,
        cardinality=cardinality,
        density=cardinality / ds.q,
        distinct_label_sets=distinct,
        feature_type="nominal" if nominal else "numeric",
    )
