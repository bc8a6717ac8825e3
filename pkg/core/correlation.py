# -*- coding: utf-8 -*-
"""
Label correlation learning.

Each label column Y_j is reconstructed from the remaining columns Y_-j by a
lasso, (1/2)||Y_-j s - Y_j||^2 + lambda ||s||_1, solved with scaled-dual
ADMM. The solutions form the off-diagonal part of S; the collaboration
matrix is G = (1 - alpha) I + alpha S.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from utils.helpers import write_json_file, write_matrix
from utils.logger import log_debug, log_info, log_warning
from .config import AdmmSettings
from .errors import DimensionMismatchError, DivergenceError


@dataclass(frozen=True)
class LassoProblem:
    design: np.ndarray
    target: np.ndarray
    lam: float

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError(f"lambda must be nonnegative, got {self.lam}")
        if self.design.ndim != 2 or self.target.ndim != 1:
            raise DimensionMismatchError("design must be a matrix and target a vector")
        if self.design.shape[0] != self.target.shape[0]:
            raise DimensionMismatchError(
                f"design has {self.design.shape[0]} rows, target has {self.target.shape[0]}")

    def objective(self, coeffs: np.ndarray) -> float:
        residual = self.design @ coeffs - self.target
        return 0.5 * float(residual @ residual) + self.lam * float(np.abs(coeffs).sum())


@dataclass
class AdmmState:
    """Iterates of one lasso solve. `coeffs` is z, the exactly sparse split variable."""
    coeffs: np.ndarray
    x: np.ndarray
    mu: np.ndarray
    rho: float
    primal_residual: float = math.inf
    dual_residual: float = math.inf
    iterations: int = 0
    converged: bool = False
    merit_history: List[float] = field(default_factory=list)


@dataclass(frozen=True)
class ColumnDiagnostics:
    label: int
    lam: float
    iterations: int
    converged: bool
    constant_label: bool
    primal_residual: float
    dual_residual: float


@dataclass(frozen=True)
class CorrelationDiagnostics:
    columns: Tuple[ColumnDiagnostics, ...]

    @property
    def converged(self) -> bool:
        return all(c.converged for c in self.columns)

    @property
    def constant_labels(self) -> List[int]:
        return [c.label for c in self.columns if c.constant_label]

    def to_dict(self) -> dict:
        return {
            "converged": self.converged,
            "columns": [dict(c.__dict__) for c in self.columns],
        }


@dataclass(frozen=True)
class CorrelationModel:
    s_matrix: np.ndarray
    alpha: float
    g_matrix: np.ndarray

    @property
    def q(self) -> int:
        return self.s_matrix.shape[0]


# --- Primitives ---

def soft_threshold(a: Union[float, np.ndarray], omega: float) -> Union[float, np.ndarray]:
    """Proximal operator of omega*|.|: sign(a) * max(|a| - omega, 0), elementwise."""
    if omega < 0:
        raise ValueError(f"threshold must be nonnegative, got {omega}")
    result = np.sign(a) * np.maximum(np.abs(a) - omega, 0.0)
    return float(result) if np.ndim(result) == 0 else result


def lambda_heuristic(target: np.ndarray, design: np.ndarray, scale: float = 0.01) -> float:
    """scale * max |Y_j^T Y_-j|; scale defaults to 1/100."""
    target = np.asarray(target, dtype=float)
    design = np.asarray(design, dtype=float)
    if design.shape[0] != target.shape[0]:
        raise DimensionMismatchError(f"design has {design.shape[0]} rows, target has {target.shape[0]}")
    if design.shape[1] == 0:
        return 0.0
    return scale * float(np.max(np.abs(target @ design)))


def admm_lasso(problem: LassoProblem, rho: float = 1.0, tol_abs: float = 1e-6, tol_rel: float = 1e-4,
               max_iter: int = 1000) -> AdmmState:
    """
    Scaled-dual ADMM for the lasso.

    The normal matrix (A^T A + rho I) is factored once and reused for every
    x-update. Stops on the absolute/relative residual rule; hitting max_iter
    returns a state with converged=False.
    """
    if rho <= 0:
        raise ValueError(f"rho must be positive, got {rho}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")

    design = np.asarray(problem.design, dtype=float)
    target = np.asarray(problem.target, dtype=float)
    p = design.shape[1]
    state = AdmmState(coeffs=np.zeros(p), x=np.zeros(p), mu=np.zeros(p), rho=rho)
    if p == 0:
        state.primal_residual = state.dual_residual = 0.0
        state.converged = True
        return state

    factor = cho_factor(design.T @ design + rho * np.eye(p), lower=True, check_finite=False)
    at_b = design.T @ target
    threshold = problem.lam / rho
    sqrt_p = math.sqrt(p)

    z = state.coeffs
    mu = state.mu
    for it in range(1, max_iter + 1):
        x = cho_solve(factor, at_b + rho * (z - mu), check_finite=False)
        z_old = z
        z = soft_threshold(x + mu, threshold)
        r = x - z
        mu = mu + r
        dz = z - z_old

        primal = float(np.linalg.norm(r))
        dual = rho * float(np.linalg.norm(dz))
        if not (math.isfinite(primal) and math.isfinite(dual)):
            raise DivergenceError("ADMM produced a non-finite iterate", iteration=it)
        state.merit_history.append(rho * primal * primal + rho * float(dz @ dz))

        eps_pri = tol_abs * sqrt_p + tol_rel * max(float(np.linalg.norm(x)), float(np.linalg.norm(z)))
        eps_dual = tol_abs * sqrt_p + tol_rel * rho * float(np.linalg.norm(mu))
        state.iterations = it
        state.primal_residual = primal
        state.dual_residual = dual
        if primal <= eps_pri and dual <= eps_dual:
            state.converged = True
            break

    state.coeffs, state.x, state.mu = z, x, mu
    return state


# --- Correlation matrix ---

def _solve_column(labels: np.ndarray, j: int, settings: AdmmSettings) -> Tuple[np.ndarray, ColumnDiagnostics]:
    target = labels[:, j]
    design = np.delete(labels, j, axis=1)
    lam = settings.lambda_override
    if lam is None:
        lam = lambda_heuristic(target, design, scale=settings.lambda_scale)
    constant = bool(np.all(target == target[0]))

    state = admm_lasso(LassoProblem(design, target, lam), rho=settings.rho, tol_abs=settings.tol_abs,
                       tol_rel=settings.tol_rel, max_iter=settings.max_iter)
    log_debug(f"Label {j}: lambda={lam:.6g}, {state.iterations} ADMM iterations, "
              f"r={state.primal_residual:.3g}, s={state.dual_residual:.3g}, nnz={np.count_nonzero(state.coeffs)}")
    if not state.converged:
        log_warning(f"ADMM for label {j} stopped at max_iter={settings.max_iter} without converging "
                    f"(r={state.primal_residual:.3g}, s={state.dual_residual:.3g}).")
    diag = ColumnDiagnostics(label=j, lam=float(lam), iterations=state.iterations, converged=state.converged,
                             constant_label=constant, primal_residual=state.primal_residual,
                             dual_residual=state.dual_residual)
    return state.coeffs, diag


def learn_correlation_matrix(labels: np.ndarray, settings: Optional[AdmmSettings] = None,
                             jobs: int = 1) -> Tuple[np.ndarray, CorrelationDiagnostics]:
    """Solves one lasso per label (in parallel for jobs > 1) and assembles S with a zero diagonal."""
    labels = np.asarray(labels, dtype=float)
    settings = settings or AdmmSettings()
    if labels.ndim != 2 or labels.shape[1] < 2:
        raise ValueError("need a label matrix with at least 2 columns")
    q = labels.shape[1]

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda j: _solve_column(labels, j, settings), range(q)))
    else:
        results = [_solve_column(labels, j, settings) for j in range(q)]

    s_matrix = np.zeros((q, q))
    for j, (coeffs, _) in enumerate(results):
        others = np.arange(q) != j
        s_matrix[others, j] = coeffs
    diagnostics = CorrelationDiagnostics(columns=tuple(d for _, d in results))

    constant = diagnostics.constant_labels
    if constant:
        log_warning(f"Constant label columns (all +1 or all -1): {constant}")
    log_info(f"Learned correlation matrix for q={q} labels; "
             f"{sum(c.converged for c in diagnostics.columns)}/{q} columns converged.")
    return s_matrix, diagnostics


def build_collaboration_matrix(s_matrix: np.ndarray, alpha: float) -> CorrelationModel:
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    s_matrix = np.asarray(s_matrix, dtype=float)
    if s_matrix.ndim != 2 or s_matrix.shape[0] != s_matrix.shape[1]:
        raise DimensionMismatchError(f"S must be square, got shape {s_matrix.shape}")
    if np.any(np.diag(s_matrix) != 0):
        raise ValueError("S must have a zero diagonal")
    g_matrix = (1.0 - alpha) * np.eye(s_matrix.shape[0]) + alpha * s_matrix
    return CorrelationModel(s_matrix=s_matrix, alpha=float(alpha), g_matrix=g_matrix)


def write_correlation(output_dir: Path, s_matrix: np.ndarray, s_name: str,
                      g_matrix: Optional[np.ndarray] = None, g_name: Optional[str] = None,
                      diagnostics: Optional[CorrelationDiagnostics] = None,
                      diagnostics_name: Optional[str] = None) -> List[Path]:
    """Exports S (and G, diagnostics when given) into output_dir. Returns the written paths."""
    output_dir = Path(output_dir)
    written = [write_matrix(output_dir / s_name, s_matrix)]
    if g_matrix is not None and g_name:
        written.append(write_matrix(output_dir / g_name, g_matrix))
    if diagnostics is not None and diagnostics_name:
        written.append(write_json_file(output_dir / diagnostics_name, diagnostics.to_dict()))
    return written
