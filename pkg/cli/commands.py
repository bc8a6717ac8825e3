# -*- coding: utf-8 -*-
"""Subcommand implementations and the exit-code contract of the command line."""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
from pydantic import ValidationError

from utils import constants
from utils.helpers import atomic_write_text, write_json_file, write_matrix
from utils.logger import log_critical, log_debug, log_info, log_warning, set_console_level
from core.config import GridPoint, RunConfig
from core.correlation import build_collaboration_matrix, learn_correlation_matrix, write_correlation
from core.dataset import describe, load_dataset, load_labels, load_matrix
from core.errors import CollabelError, DimensionMismatchError, DivergenceError
from core.metrics import evaluate_all
from core.model_store import load_model, save_model, write_convergence_log
from core.settings_service import SettingsService
from core.trainer import labels_from_scores, predict_scores, train_model
from core.tuner import (cross_validate, nested_cross_validate, sensitivity_sweep, set_progress_enabled,
                        write_cv_result)
from .parser import build_parser

# CLI flag -> settings key
_SETTING_FLAGS = {
    "alpha": "alpha",
    "lambda1": "lambda1",
    "lambda2": "lambda2",
    "rho": "rho",
    "outer_tol": "outer_tol",
    "max_outer_iter": "max_outer_iter",
    "lambda_override": "lambda_override",
    "seed": "seed",
    "jobs": "jobs",
    "folds": "folds",
    "inner_folds": "inner_folds",
    "metric": "selection_metric",
    "output_format": "output_format",
    "alphas": "alpha_grid",
    "lambda2s": "lambda2_grid",
}

_INPUT_FLAGS = ("features", "labels", "model", "scores", "predictions")


def _status(converged: bool) -> int:
    return constants.EXIT_OK if converged else constants.EXIT_NOT_CONVERGED


def build_run_config(args: argparse.Namespace, settings: SettingsService) -> RunConfig:
    """Merges flags over the settings file over defaults, then validates everything at once."""
    for flag, key in _SETTING_FLAGS.items():
        settings.set_setting(key, getattr(args, flag, None))
    log_debug(f"Effective settings: {settings.get_all_settings()}")
    inputs = {role: Path(getattr(args, role)) for role in _INPUT_FLAGS if getattr(args, role, None)}
    return RunConfig(
        subcommand=args.subcommand,
        inputs=inputs,
        trainer=settings.trainer_config(),
        grid=settings.grid() if getattr(args, "grid", False) else None,
        seed=settings.get_setting("seed"),
        output_dir=Path(args.output),
        jobs=settings.get_setting("jobs"),
        output_format=settings.get_setting("output_format"),
        folds=settings.get_setting("folds"),
        inner_folds=settings.get_setting("inner_folds"),
        selection_metric=settings.get_setting("selection_metric"),
    )


# --- Subcommands ---

def cmd_corr(run: RunConfig) -> int:
    labels, _ = load_labels(run.inputs["labels"])
    if "features" in run.inputs:
        features = load_matrix(run.inputs["features"])
        if features.shape[0] != labels.shape[0]:
            raise DimensionMismatchError(
                f"{run.inputs['features']} has {features.shape[0]} rows but labels have {labels.shape[0]}")
    s_matrix, diagnostics = learn_correlation_matrix(labels, run.trainer.admm, jobs=run.jobs)
    correlation = build_collaboration_matrix(s_matrix, run.trainer.alpha)
    written = write_correlation(run.output_dir, s_matrix, constants.S_MATRIX_NAME,
                                correlation.g_matrix, constants.G_MATRIX_NAME,
                                diagnostics, constants.CORRELATION_DIAGNOSTICS_NAME)
    for path in written:
        print(path)
    return _status(diagnostics.converged)


def cmd_train(run: RunConfig) -> int:
    ds = load_dataset(run.inputs["features"], run.inputs["labels"])
    model, corr_diagnostics = train_model(ds, run.trainer, jobs=run.jobs)
    print(save_model(model, run.output_dir / constants.MODEL_FILE_NAME))
    print(write_convergence_log(model.diagnostics, run.output_dir / constants.CONVERGENCE_LOG_NAME))
    return _status(model.diagnostics.converged and corr_diagnostics.converged)


def cmd_predict(run: RunConfig) -> int:
    model = load_model(run.inputs["model"])
    features = load_matrix(run.inputs["features"])
    scores = predict_scores(model, features)
    predictions = labels_from_scores(scores)
    print(write_matrix(run.output_dir / constants.SCORES_NAME, scores))
    print(write_matrix(run.output_dir / constants.PREDICTIONS_NAME, predictions.astype(int), fmt="%d"))
    if not model.diagnostics.converged:
        log_warning(f"Model {run.inputs['model']} was saved without converging.")
    return constants.EXIT_OK


def cmd_eval(run: RunConfig) -> int:
    truth, _ = load_labels(run.inputs["labels"])
    scores = load_matrix(run.inputs["scores"])
    predictions, _ = load_labels(run.inputs["predictions"])
    report = evaluate_all(truth, scores, predictions)
    if run.output_format == "structured":
        write_json_file(run.output_dir / constants.METRICS_JSON_NAME, report.to_dict())
        sys.stdout.write(json.dumps(report.to_dict(), indent=4) + "\n")
    else:
        atomic_write_text(run.output_dir / constants.METRICS_TEXT_NAME, report.to_text())
        sys.stdout.write(report.to_text())
    return constants.EXIT_OK


def cmd_cv(run: RunConfig) -> int:
    ds = load_dataset(run.inputs["features"], run.inputs["labels"])
    if run.grid is not None:
        result, searches = nested_cross_validate(ds, run.grid, run.folds, run.inner_folds, run.selection_metric,
                                                 run.seed, run.trainer, jobs=run.jobs)
        atomic_write_text(run.output_dir / constants.SENSITIVITY_NAME, _mean_grid_table(searches))
    else:
        point = GridPoint(alpha=run.trainer.alpha, lambda2=run.trainer.lambda2)
        result = cross_validate(ds, point, run.folds, run.seed, run.trainer, jobs=run.jobs)
    for path in write_cv_result(result, run.output_dir, run.output_format):
        log_info(f"Wrote {path}")
    sys.stdout.write(result.to_text())
    return _status(result.converged)


def _mean_grid_table(searches) -> str:
    """Grid scores averaged over the outer folds, as alpha,lambda2,score rows."""
    lines = ["alpha,lambda2,score"]
    for point in sorted(searches[0].table, key=GridPoint.sort_key):
        score = float(np.mean([s.table[point] for s in searches]))
        lines.append(f"{point.alpha!r},{point.lambda2!r},{score!r}")
    return "\n".join(lines) + "\n"


def cmd_sweep(run: RunConfig, parameter: str, values: List[float]) -> int:
    ds = load_dataset(run.inputs["features"], run.inputs["labels"])
    result = sensitivity_sweep(ds, run.trainer, parameter, values, run.folds, run.seed, jobs=run.jobs)
    print(atomic_write_text(run.output_dir / constants.SWEEP_NAME, result.to_csv()))
    return constants.EXIT_OK


def cmd_describe(run: RunConfig) -> int:
    summary = describe(load_dataset(run.inputs["features"], run.inputs["labels"]))
    if run.output_format == "structured":
        sys.stdout.write(json.dumps(summary.to_dict(), indent=4) + "\n")
    else:
        sys.stdout.write("".join(f"{k}={v}\n" for k, v in summary.to_dict().items()))
    return constants.EXIT_OK


# --- Entry ---

def _configure_console(verbosity: int):
    if verbosity >= 2:
        set_console_level(logging.DEBUG)
    elif verbosity == 1:
        set_console_level(logging.INFO)
    else:
        set_console_level(logging.WARNING)
    set_progress_enabled(verbosity >= 1)


def _fail(message: str, code: int) -> int:
    sys.stderr.write(f"{constants.APP_NAME}: error: {message}\n")
    return code


def _validation_message(e: ValidationError) -> str:
    first = e.errors()[0]
    where = ".".join(str(p) for p in first.get("loc", ()))
    return f"{where}: {first.get('msg')}" if where else str(first.get("msg"))


def run(argv: Optional[List[str]] = None) -> int:
    """Parses argv, runs one subcommand and returns its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse already printed usage; --help exits 0
        return constants.EXIT_OK if e.code in (0, None) else constants.EXIT_INPUT_ERROR

    _configure_console(args.verbose)
    log_debug(f"argv: {argv if argv is not None else sys.argv[1:]}")
    handlers: Dict[str, object] = {
        "corr": cmd_corr,
        "train": cmd_train,
        "predict": cmd_predict,
        "eval": cmd_eval,
        "cv": cmd_cv,
        "describe": cmd_describe,
    }
    try:
        settings = SettingsService(Path(args.config) if args.config else None)
        run_config = build_run_config(args, settings)
        log_info(f"Running '{args.subcommand}' with output directory {run_config.output_dir}")
        if args.subcommand == "sweep":
            code = cmd_sweep(run_config, args.parameter, args.values)
        else:
            code = handlers[args.subcommand](run_config)
    except DivergenceError as e:
        log_info(f"Divergence: {e}")
        return _fail(str(e), constants.EXIT_DIVERGENCE)
    except ValidationError as e:
        return _fail(_validation_message(e), constants.EXIT_INPUT_ERROR)
    except (CollabelError, ValueError, OSError) as e:
        log_info(f"Input error: {e}")
        return _fail(str(e), constants.EXIT_INPUT_ERROR)
    except Exception as e:
        log_critical(f"Unexpected failure in '{args.subcommand}': {e}", exc_info=True)
        return _fail(f"unexpected failure: {e}", constants.EXIT_UNEXPECTED)

    if code == constants.EXIT_NOT_CONVERGED:
        sys.stderr.write(f"{constants.APP_NAME}: warning: finished without convergence; results were written\n")
    log_info(f"'{args.subcommand}' finished with exit code {code}")
    return code
