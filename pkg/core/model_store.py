# -*- coding: utf-8 -*-
"""
Plain-text persistence of trained models.

A model file is a versioned header followed by named matrix blocks in a
fixed order. Every real is written with %.17g, so a reloaded model
predicts bit-for-bit like the one that was saved.
"""
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from utils.constants import FLOAT_FORMAT, MODEL_FILE_MAGIC, MODEL_FILE_VERSION
from utils.helpers import atomic_write_text, format_matrix
from utils.logger import log_info
from .config import TrainerConfig
from .correlation import CorrelationModel
from .dataset import check_label_name
from .errors import DataFormatError
from .trainer import FitDiagnostics, KernelSpec, TrainedModel

_BLOCK_ORDER = ("A", "b", "G", "S", "X", "delta_z", "objective")


def _block(name: str, matrix: np.ndarray) -> str:
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    rows, cols = matrix.shape
    return f"block {name} {rows} {cols}\n" + format_matrix(matrix, fmt=FLOAT_FORMAT)


def save_model(model: TrainedModel, path: Path) -> Path:
    if model.names:
        for name in model.names:
            check_label_name(name)
    labels_line = ",".join(model.names) if model.names else "-"
    header = [
        f"{MODEL_FILE_MAGIC} {MODEL_FILE_VERSION}",
        f"converged {'true' if model.diagnostics.converged else 'false'}",
        f"shape {model.n} {model.d} {model.q}",
        f"bandwidth {FLOAT_FORMAT % model.kernel.bandwidth}",
        f"alpha {FLOAT_FORMAT % model.correlation.alpha}",
        f"lambda1 {FLOAT_FORMAT % model.config.lambda1}",
        f"lambda2 {FLOAT_FORMAT % model.config.lambda2}",
        f"labels {labels_line}",
    ]
    blocks = [
        _block("A", model.dual_coeffs),
        _block("b", model.bias.reshape(1, -1)),
        _block("G", model.correlation.g_matrix),
        _block("S", model.correlation.s_matrix),
        _block("X", model.features),
        _block("delta_z", np.array(model.diagnostics.delta_z_history).reshape(1, -1)),
        _block("objective", np.array(model.diagnostics.objective_history).reshape(1, -1)),
    ]
    text = "\n".join(header) + "\n" + "".join(blocks) + "end\n"
    atomic_write_text(Path(path), text)
    log_info(f"Model saved to {path}")
    return Path(path)


class _ModelReader:
    """Line cursor over a model file that reports errors with line numbers."""

    def __init__(self, path: Path):
        self.path = Path(path)
        try:
            self.lines = self.path.read_text(encoding="utf-8").splitlines()
        except FileNotFoundError:
            raise DataFormatError("model file not found", path=str(self.path)) from None
        except UnicodeDecodeError:
            raise DataFormatError("model file is not UTF-8 text", path=str(self.path)) from None
        self.pos = 0

    def fail(self, message: str) -> DataFormatError:
        return DataFormatError(message, path=str(self.path), line=min(self.pos, len(self.lines)) or None)

    def next_line(self) -> str:
        if self.pos >= len(self.lines):
            self.pos += 1
            raise self.fail("unexpected end of model file")
        line = self.lines[self.pos]
        self.pos += 1
        return line

    def keyword(self, key: str, count: int = 1) -> List[str]:
        tokens = self.next_line().split()
        if not tokens or tokens[0] != key or len(tokens) != count + 1:
            raise self.fail(f"expected '{key}' with {count} value(s)")
        return tokens[1:]

    def real(self, key: str) -> float:
        (token,) = self.keyword(key)
        try:
            return float(token)
        except ValueError:
            raise self.fail(f"'{key}' value '{token}' is not a number") from None

    def block(self, name: str, shape: Tuple[Optional[int], Optional[int]]) -> np.ndarray:
        declared, rows_token, cols_token = self.keyword("block", 3)
        rows, cols = self._int(rows_token), self._int(cols_token)
        if declared != name:
            raise self.fail(f"expected block '{name}', found '{declared}'")
        for want, got, axis in zip(shape, (rows, cols), ("rows", "columns")):
            if want is not None and want != got:
                raise self.fail(f"block {name} has {got} {axis}, expected {want}")
        matrix = np.empty((rows, cols))
        for r in range(rows):
            tokens = self.next_line().split(",")
            if len(tokens) != cols:
                raise self.fail(f"block {name} row has {len(tokens)} values, expected {cols}")
            try:
                matrix[r] = [float(t) for t in tokens]
            except ValueError:
                raise self.fail(f"non-numeric value in block {name}") from None
        return matrix

    def _int(self, token: str) -> int:
        try:
            value = int(token)
        except ValueError:
            raise self.fail(f"'{token}' is not an integer") from None
        if value < 0:
            raise self.fail(f"negative dimension {value}")
        return value


def load_model(path: Path) -> TrainedModel:
    reader = _ModelReader(path)
    magic = reader.next_line().split()
    if len(magic) != 2 or magic[0] != MODEL_FILE_MAGIC:
        raise reader.fail("not a collabel model file")
    if magic[1] != str(MODEL_FILE_VERSION):
        raise reader.fail(f"unsupported model file version {magic[1]}")

    (converged_token,) = reader.keyword("converged")
    if converged_token not in ("true", "false"):
        raise reader.fail(f"converged must be true or false, got '{converged_token}'")
    n, d, q = (reader._int(t) for t in reader.keyword("shape", 3))
    bandwidth = reader.real("bandwidth")
    alpha = reader.real("alpha")
    lambda1 = reader.real("lambda1")
    lambda2 = reader.real("lambda2")
    (labels_token,) = reader.keyword("labels")
    names = None if labels_token == "-" else tuple(labels_token.split(","))
    if names is not None and len(names) != q:
        raise reader.fail(f"{len(names)} label names for {q} labels")

    dual_coeffs = reader.block("A", (n, q))
    bias = reader.block("b", (1, q))[0]
    g_matrix = reader.block("G", (q, q))
    s_matrix = reader.block("S", (q, q))
    features = reader.block("X", (n, d))
    delta_z = reader.block("delta_z", (1, None))[0]
    objective = reader.block("objective", (1, delta_z.shape[0]))[0]
    if reader.next_line().strip() != "end":
        raise reader.fail("expected 'end'")

    try:
        kernel = KernelSpec(bandwidth)
        config = TrainerConfig(alpha=alpha, lambda1=lambda1, lambda2=lambda2)
    except ValueError as e:
        # pydantic's ValidationError is a ValueError too
        raise DataFormatError(f"invalid model parameters: {e}", path=str(path)) from None

    model = TrainedModel(
        dual_coeffs=dual_coeffs,
        bias=bias,
        kernel=kernel,
        features=features,
        correlation=CorrelationModel(s_matrix=s_matrix, alpha=alpha, g_matrix=g_matrix),
        config=config,
        diagnostics=FitDiagnostics(tuple(delta_z.tolist()), tuple(objective.tolist()), converged_token == "true"),
        names=names,
    )
    log_info(f"Model loaded from {path} (n={n}, d={d}, q={q})")
    return model


def write_convergence_log(diagnostics: FitDiagnostics, path: Path) -> Path:
    lines = []
    if not diagnostics.converged:
        lines.append("# warning: not converged")
    lines.append("# iteration,delta_z,objective")
    for it, (dz, obj) in enumerate(zip(diagnostics.delta_z_history, diagnostics.objective_history), start=1):
        lines.append(f"{it},{FLOAT_FORMAT % dz},{FLOAT_FORMAT % obj}")
    return atomic_write_text(Path(path), "\n".join(lines) + "\n")
