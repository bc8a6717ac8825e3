# -*- coding: utf-8 -*-
import argparse
from typing import List

from utils import constants


def float_list(text: str) -> List[float]:
    """Parses '0,0.5,1' into [0.0, 0.5, 1.0]."""
    try:
        values = [float(token) for token in text.split(",") if token.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got '{text}'") from None
    if not values:
        raise argparse.ArgumentTypeError("expected at least one number")
    return values


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", type=str, default=None, help="JSON settings file (overrides built-in defaults)")
    p.add_argument("-o", "--output", type=str, default=".", help="output directory (default: current)")
    p.add_argument("-v", "--verbose", action="count", default=0, help="-v for progress and info, -vv for debug")
    p.add_argument("--format", dest="output_format", choices=constants.OUTPUT_FORMATS, default=None,
                   help="text (key=value) or structured (JSON) result files")
    p.add_argument("--jobs", type=int, default=None, help="worker threads for columns, folds and grid points")


def _add_hyperparameters(p: argparse.ArgumentParser):
    p.add_argument("--alpha", type=float, default=None, help=f"collaboration weight in [0,1] (default {constants.DEFAULT_ALPHA})")
    p.add_argument("--lambda1", type=float, default=None, help=f"label-fit weight (default {constants.DEFAULT_LAMBDA1})")
    p.add_argument("--lambda2", type=float, default=None, help=f"model complexity weight (default {constants.DEFAULT_LAMBDA2})")
    p.add_argument("--rho", type=float, default=None, help=f"ADMM penalty (default {constants.DEFAULT_RHO})")
    p.add_argument("--outer-tol", type=float, default=None,
                   help=f"stop when the embedding changes less than this (default {constants.DEFAULT_OUTER_TOL})")
    p.add_argument("--max-outer-iter", type=int, default=None,
                   help=f"outer iteration cap (default {constants.DEFAULT_MAX_OUTER_ITER})")


def _add_dataset(p: argparse.ArgumentParser, features_required: bool = True):
    p.add_argument("--features", required=features_required, help="feature file (n rows, d columns)")
    p.add_argument("--labels", required=True, help="label file (n rows, q columns of 0/1 or -1/+1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=constants.APP_NAME,
        description=constants.GENERAL_APP_HELP_TEXT,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="subcommand", required=True, metavar="subcommand")

    # --- corr ---
    p = sub.add_parser("corr", help="learn the label correlation matrix S and G")
    _add_dataset(p, features_required=False)
    _add_common(p)
    _add_hyperparameters(p)
    p.add_argument("--lambda", dest="lambda_override", type=float, default=None,
                   help="fixed sparsity weight for every label (default: per-label heuristic)")

    # --- train ---
    p = sub.add_parser("train", help="fit a model on a dataset")
    _add_dataset(p)
    _add_common(p)
    _add_hyperparameters(p)

    # --- predict ---
    p = sub.add_parser("predict", help="score instances with a saved model")
    p.add_argument("--model", required=True, help="model file written by 'train'")
    p.add_argument("--features", required=True, help="feature file to score")
    _add_common(p)

    # --- eval ---
    p = sub.add_parser("eval", help="compute the seven evaluation metrics")
    p.add_argument("--labels", required=True, help="ground-truth label file")
    p.add_argument("--scores", required=True, help="score matrix written by 'predict'")
    p.add_argument("--predictions", required=True, help="-1/+1 prediction matrix written by 'predict'")
    _add_common(p)

    # --- cv ---
    p = sub.add_parser("cv", help="k-fold cross-validation")
    _add_dataset(p)
    _add_common(p)
    _add_hyperparameters(p)
    p.add_argument("--seed", type=int, default=None,
                   help=f"fold shuffling seed, a non-negative integer (default {constants.DEFAULT_SEED})")
    p.add_argument("--folds", type=int, default=None, help=f"outer folds (default {constants.DEFAULT_FOLDS})")
    p.add_argument("--grid", action="store_true", help="tune alpha and lambda2 by inner grid search on every fold")
    p.add_argument("--inner-folds", type=int, default=None, help=f"inner folds (default {constants.DEFAULT_INNER_FOLDS})")
    p.add_argument("--alphas", type=float_list, default=None, help="alpha grid, comma separated")
    p.add_argument("--lambda2s", type=float_list, default=None, help="lambda2 grid, comma separated")
    p.add_argument("--metric", choices=constants.METRIC_NAMES, default=None,
                   help=f"grid selection metric (default {constants.DEFAULT_SELECTION_METRIC})")

    # --- sweep ---
    p = sub.add_parser("sweep", help="cross-validated sensitivity curve of one hyperparameter")
    _add_dataset(p)
    _add_common(p)
    _add_hyperparameters(p)
    p.add_argument("--parameter", required=True, choices=("alpha", "lambda1", "lambda2"))
    p.add_argument("--values", required=True, type=float_list, help="values to try, comma separated")
    p.add_argument("--seed", type=int, default=None, help="fold shuffling seed, a non-negative integer")
    p.add_argument("--folds", type=int, default=None)

    # --- describe ---
    p = sub.add_parser("describe", help="dataset summary")
    _add_dataset(p)
    _add_common(p)

    return parser
