# -*- coding: utf-8 -*-
import os
import sys
from pathlib import Path
# --- Base Directory ---
# Determine if running as a bundled executable (PyInstaller) or script
if getattr(sys, 'frozen', False):
    APP_DIR = Path(sys.executable).parent
else:
    APP_DIR = Path(__file__).parent.parent # Assuming constants.py is in utils/

APP_NAME = "collabel"

# --- Data Directories ---
DATA_DIR = Path(os.environ.get("COLLABEL_DATA_DIR", APP_DIR / "data"))
SETTINGS_DIR = DATA_DIR / "settings"
LOGS_DIR = DATA_DIR / "logs"
# --- File Names ---
SETTINGS_FILE = SETTINGS_DIR / "settings.json"
LOG_FILE = LOGS_DIR / "collabel.log"

MODEL_FILE_NAME = "model.txt"
CONVERGENCE_LOG_NAME = "convergence.txt"
S_MATRIX_NAME = "S.txt"
G_MATRIX_NAME = "G.txt"
CORRELATION_DIAGNOSTICS_NAME = "correlation_diagnostics.json"
SCORES_NAME = "scores.txt"
PREDICTIONS_NAME = "predictions.txt"
METRICS_TEXT_NAME = "metrics.txt"
METRICS_JSON_NAME = "metrics.json"
CV_TEXT_NAME = "cv_result.txt"
CV_JSON_NAME = "cv_result.json"
CV_TIMING_NAME = "cv_timing.json"
SENSITIVITY_NAME = "sensitivity.csv"
SWEEP_NAME = "sweep.csv"

# --- Model File Format ---
MODEL_FILE_MAGIC = "collabel-model"
MODEL_FILE_VERSION = 1
FLOAT_FORMAT = "%.17g" # round-trips every double exactly
LABELS_HEADER = "#labels"

# --- Default Values ---
DEFAULT_LOGGING_ENABLED = True
DEFAULT_ALPHA = 0.5
DEFAULT_LAMBDA1 = 1.0 # "empirically set to 1"
DEFAULT_LAMBDA2 = 0.1
DEFAULT_RHO = 1.0
DEFAULT_ADMM_TOL_ABS = 1e-6
DEFAULT_ADMM_TOL_REL = 1e-4
DEFAULT_ADMM_MAX_ITER = 1000
DEFAULT_LAMBDA_SCALE = 0.01 # lambda = scale * ||Y_j^T Y_-j||_inf
DEFAULT_OUTER_TOL = 1e-6
DEFAULT_MAX_OUTER_ITER = 50
DEFAULT_SEED = 42
DEFAULT_FOLDS = 10
DEFAULT_INNER_FOLDS = 5
DEFAULT_JOBS = 1
DEFAULT_SELECTION_METRIC = "average_precision"
DEFAULT_OUTPUT_FORMAT = "text"
OUTPUT_FORMATS = ("text", "structured")

# alpha in {0, 0.1, ..., 1}; lambda2 on the 1-and-2 mantissa ladder
DEFAULT_ALPHA_GRID = tuple(round(0.1 * i, 1) for i in range(11))
DEFAULT_LAMBDA2_GRID = (1e-3, 2e-3, 1e-2, 2e-2, 1e-1, 2e-1, 1.0)

# --- Metrics ---
METRIC_NAMES = (
    "one_error", "hamming_loss", "coverage", "ranking_loss",
    "average_precision", "macro_f1", "micro_f1",
)
LOWER_IS_BETTER = frozenset({"one_error", "hamming_loss", "coverage", "ranking_loss"})
HIGHER_IS_BETTER = frozenset({"average_precision", "macro_f1", "micro_f1"})

# --- Exit Codes ---
EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_INPUT_ERROR = 2
EXIT_DIVERGENCE = 3
EXIT_NOT_CONVERGED = 4


# --- Ensure Directories Exist ---
def ensure_dirs():
    """Creates necessary data directories if they don't exist."""
    for d in (DATA_DIR, SETTINGS_DIR, LOGS_DIR):
        d.mkdir(parents=True, exist_ok=True)


# --- General Application Help ---
GENERAL_APP_HELP_TEXT = """
collabel - collaborative multi-label learning
=============================================

Subcommands:
  corr      learn the label correlation matrix S (and G for --alpha)
  train     fit a model; writes model.txt and convergence.txt
  predict   score new instances with a saved model
  eval      compute the seven evaluation metrics
  cv        k-fold cross-validation (optionally with inner grid search)
  sweep     one-at-a-time sensitivity curve for alpha, lambda1 or lambda2
  describe  dataset summary (n, d, q, label cardinality)

Files are plain text: one instance per line, fields separated by commas or
whitespace. Label files hold 0/1 or -1/+1 and may start with
'#labels name1,...,nameq'. Features are used as given (no normalization).

Exit codes: 0 ok, 2 input error, 3 numerical divergence,
4 finished without convergence (results still written).
"""
