# -*- coding: utf-8 -*-
"""
Kernel model training by biconvex alternation.

Starting from Z = Y, every outer iteration
  1. refits the kernel model (b, A) to the current embedding Z,
  2. recomputes the model outputs T = (1/lambda2) K A + 1 b^T,
  3. updates Z in closed form against T and the label targets Y through G,
until the Frobenius change of Z drops below outer_tol.

The primal weights are never formed; the model is represented by the dual
coefficients A and the retained training instances.
"""
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.spatial.distance import cdist, pdist, squareform

from utils.logger import log_debug, log_info, log_warning
from .config import TrainerConfig
from .correlation import CorrelationDiagnostics, CorrelationModel, build_collaboration_matrix, learn_correlation_matrix
from .dataset import Dataset
from .errors import DimensionMismatchError, DivergenceError


@dataclass(frozen=True)
class KernelSpec:
    bandwidth: float

    def __post_init__(self):
        if not (self.bandwidth > 0 and math.isfinite(self.bandwidth)):
            raise ValueError(f"kernel bandwidth must be positive and finite, got {self.bandwidth}")


@dataclass
class TrainerState:
    embedding: np.ndarray      # Z
    dual_coeffs: np.ndarray    # A
    bias: np.ndarray           # b
    outputs: np.ndarray        # T
    residual: np.ndarray       # E = Z - T
    kernel: np.ndarray         # K
    h_factor: tuple            # cho_factor of H = K / lambda2 + I
    h_inv_ones: np.ndarray     # H^-1 1
    delta_z_history: List[float] = field(default_factory=list)
    objective_history: List[float] = field(default_factory=list)


@dataclass(frozen=True)
class FitDiagnostics:
    delta_z_history: Tuple[float, ...]
    objective_history: Tuple[float, ...]
    converged: bool

    @property
    def iterations(self) -> int:
        return len(self.delta_z_history)


@dataclass(frozen=True)
class TrainedModel:
    dual_coeffs: np.ndarray
    bias: np.ndarray
    kernel: KernelSpec
    features: np.ndarray
    correlation: CorrelationModel
    config: TrainerConfig
    diagnostics: FitDiagnostics
    names: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        for name in ("dual_coeffs", "bias", "features"):
            array = np.array(getattr(self, name), dtype=float, copy=True)
            array.setflags(write=False)
            object.__setattr__(self, name, array)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    @property
    def q(self) -> int:
        return self.dual_coeffs.shape[1]


# --- Kernel ---

def gaussian_bandwidth(features: np.ndarray) -> float:
    """Mean Euclidean distance over all unordered pairs of instances."""
    features = np.asarray(features, dtype=float)
    if features.shape[0] < 2:
        raise ValueError("bandwidth needs at least 2 instances")
    sigma = float(np.mean(pdist(features, metric="euclidean")))
    if sigma <= 0:
        raise ValueError("all training instances are identical; kernel bandwidth would be 0")
    return sigma


def kernel_matrix(features: np.ndarray, spec: KernelSpec) -> np.ndarray:
    sq_dists = squareform(pdist(np.asarray(features, dtype=float), metric="sqeuclidean"))
    return np.exp(-sq_dists / (2.0 * spec.bandwidth ** 2))


def cross_kernel(train: np.ndarray, test: np.ndarray, spec: KernelSpec) -> np.ndarray:
    """Row i, column j holds K(test_i, train_j)."""
    sq_dists = cdist(np.asarray(test, dtype=float), np.asarray(train, dtype=float), metric="sqeuclidean")
    return np.exp(-sq_dists / (2.0 * spec.bandwidth ** 2))


# --- Closed-form updates ---

def init_state(kernel: np.ndarray, labels: np.ndarray, config: TrainerConfig) -> TrainerState:
    n, q = labels.shape
    h = kernel / config.lambda2 + np.eye(n)
    h_factor = cho_factor(h, lower=True)
    h_inv_ones = cho_solve(h_factor, np.ones(n), check_finite=False)
    embedding = np.array(labels, dtype=float, copy=True)
    return TrainerState(
        embedding=embedding,
        dual_coeffs=np.zeros((n, q)),
        bias=np.zeros(q),
        outputs=np.zeros((n, q)),
        residual=embedding.copy(),
        kernel=kernel,
        h_factor=h_factor,
        h_inv_ones=h_inv_ones,
    )


def update_model_params(state: TrainerState, config: TrainerConfig) -> Tuple[np.ndarray, np.ndarray]:
    """
    Returns (b, A) with b^T = 1^T H^-1 Z / 1^T H^-1 1 and A = H^-1 (Z - 1 b^T).

    H^-1 Z - (H^-1 1) b^T is the same A and reuses the cached factorization.
    """
    h_inv_z = cho_solve(state.h_factor, state.embedding, check_finite=False)
    bias = (state.h_inv_ones @ state.embedding) / state.h_inv_ones.sum()
    dual_coeffs = h_inv_z - np.outer(state.h_inv_ones, bias)
    return bias, dual_coeffs


def compute_outputs(state: TrainerState, config: TrainerConfig) -> np.ndarray:
    return state.kernel @ state.dual_coeffs / config.lambda2 + state.bias[np.newaxis, :]


def update_embedding(outputs: np.ndarray, labels: np.ndarray, g_matrix: np.ndarray, lambda1: float) -> np.ndarray:
    """Z = (T + lambda1 Y G^T)(I + lambda1 G G^T)^-1, solved through the symmetric system."""
    q = g_matrix.shape[0]
    m = np.eye(q) + lambda1 * (g_matrix @ g_matrix.T)
    rhs = outputs + lambda1 * (labels @ g_matrix.T)
    return cho_solve(cho_factor(m, lower=True, check_finite=False), rhs.T, check_finite=False).T


def objective_value(state: TrainerState, config: TrainerConfig, labels: np.ndarray, g_matrix: np.ndarray) -> float:
    fit_term = 0.5 * float(np.sum(state.residual ** 2))
    label_term = 0.5 * config.lambda1 * float(np.sum((state.embedding @ g_matrix - labels) ** 2))
    # (lambda2 / 2) ||W||^2 with ||W||^2 = trace(A^T K A) / lambda2^2
    complexity = float(np.sum(state.dual_coeffs * (state.kernel @ state.dual_coeffs))) / (2.0 * config.lambda2)
    value = fit_term + label_term + complexity
    if not math.isfinite(value):
        raise DivergenceError("objective is not finite")
    return value


# --- Fit / predict ---

def fit(ds: Dataset, correlation: CorrelationModel, config: TrainerConfig) -> TrainedModel:
    if ds.n < 2:
        raise ValueError("fit needs at least 2 training instances")
    if correlation.q != ds.q:
        raise DimensionMismatchError(f"correlation model has {correlation.q} labels, dataset has {ds.q}")

    labels = ds.labels
    g_matrix = correlation.g_matrix
    spec = KernelSpec(gaussian_bandwidth(ds.features))
    state = init_state(kernel_matrix(ds.features, spec), labels, config)
    log_debug(f"fit: n={ds.n}, q={ds.q}, sigma={spec.bandwidth:.6g}, alpha={config.alpha}, "
              f"lambda1={config.lambda1}, lambda2={config.lambda2}")

    converged = False
    for it in range(1, config.max_outer_iter + 1):
        state.bias, state.dual_coeffs = update_model_params(state, config)
        state.outputs = compute_outputs(state, config)
        new_embedding = update_embedding(state.outputs, labels, g_matrix, config.lambda1)
        if not np.all(np.isfinite(new_embedding)) or not np.all(np.isfinite(state.dual_coeffs)):
            raise DivergenceError("non-finite value in model iterate", iteration=it)

        delta_z = float(np.linalg.norm(new_embedding - state.embedding))
        state.embedding = new_embedding
        state.residual = state.embedding - state.outputs
        try:
            objective = objective_value(state, config, labels, g_matrix)
        except DivergenceError:
            raise DivergenceError("objective is not finite", iteration=it) from None
        state.delta_z_history.append(delta_z)
        state.objective_history.append(objective)
        log_debug(f"outer iteration {it}: delta_z={delta_z:.3e}, objective={objective:.10g}")
        if delta_z < config.outer_tol:
            converged = True
            break

    # model parameters belong to the final embedding
    state.bias, state.dual_coeffs = update_model_params(state, config)
    diagnostics = FitDiagnostics(tuple(state.delta_z_history), tuple(state.objective_history), converged)
    if converged:
        log_info(f"Fit converged after {diagnostics.iterations} iterations "
                 f"(delta_z={diagnostics.delta_z_history[-1]:.3e}).")
    else:
        log_warning(f"Fit stopped at max_outer_iter={config.max_outer_iter} without converging "
                    f"(last delta_z={diagnostics.delta_z_history[-1]:.3e}).")
    return TrainedModel(
        dual_coeffs=state.dual_coeffs,
        bias=state.bias,
        kernel=spec,
        features=ds.features,
        correlation=correlation,
        config=config,
        diagnostics=diagnostics,
        names=ds.names,
    )


def predict_scores(model: TrainedModel, test: np.ndarray) -> np.ndarray:
    """Raw kernel outputs ((1/lambda2) K_test A + 1 b^T) blended by G: one row per test instance."""
    test = np.asarray(test, dtype=float)
    if test.ndim != 2:
        raise DimensionMismatchError("test instances must be a 2-D matrix")
    if test.shape[0] == 0:
        return np.zeros((0, model.q))
    if test.shape[1] != model.d:
        raise DimensionMismatchError(f"test instances have {test.shape[1]} features, model expects {model.d}")
    raw = cross_kernel(model.features, test, model.kernel) @ model.dual_coeffs / model.config.lambda2 + model.bias
    return raw @ model.correlation.g_matrix


def labels_from_scores(scores: np.ndarray) -> np.ndarray:
    """Elementwise sign with sign(0) = -1."""
    return np.where(np.asarray(scores) > 0, 1.0, -1.0)


def predict_labels(model: TrainedModel, test: np.ndarray) -> np.ndarray:
    return labels_from_scores(predict_scores(model, test))


def train_model(ds: Dataset, config: TrainerConfig,
                jobs: int = 1) -> Tuple[TrainedModel, CorrelationDiagnostics]:
    """Learns S on the training labels, builds G for config.alpha and fits the kernel model."""
    s_matrix, corr_diagnostics = learn_correlation_matrix(ds.labels, config.admm, jobs=jobs)
    correlation = build_collaboration_matrix(s_matrix, config.alpha)
    return fit(ds, correlation, config), corr_diagnostics
