# -*- coding: utf-8 -*-
from pathlib import Path
from typing import Any, Dict, Optional

from pydantic import ValidationError

from utils import constants
from utils.helpers import load_json_file
from utils.logger import log_info, log_warning, log_debug, set_logging_enabled
from .config import AdmmSettings, Grid, TrainerConfig
from .errors import DataFormatError


class SettingsService:
    """
    Manages run defaults: built-in constants, overridden by an optional JSON
    settings file, overridden in turn by whatever the caller sets explicitly.
    """

    def __init__(self, filepath: Optional[Path] = None):
        self.filepath = Path(filepath) if filepath is not None else constants.SETTINGS_FILE
        self._explicit_file = filepath is not None
        self.settings: Dict[str, Any] = self._load_settings()
        # Apply loaded logging setting immediately
        set_logging_enabled(bool(self.get_setting("logging_enabled", constants.DEFAULT_LOGGING_ENABLED)))

    @staticmethod
    def defaults() -> Dict[str, Any]:
        return {
            "logging_enabled": constants.DEFAULT_LOGGING_ENABLED,
            "alpha": constants.DEFAULT_ALPHA,
            "lambda1": constants.DEFAULT_LAMBDA1,
            "lambda2": constants.DEFAULT_LAMBDA2,
            "outer_tol": constants.DEFAULT_OUTER_TOL,
            "max_outer_iter": constants.DEFAULT_MAX_OUTER_ITER,
            "rho": constants.DEFAULT_RHO,
            "admm_tol_abs": constants.DEFAULT_ADMM_TOL_ABS,
            "admm_tol_rel": constants.DEFAULT_ADMM_TOL_REL,
            "admm_max_iter": constants.DEFAULT_ADMM_MAX_ITER,
            "lambda_override": None,
            "lambda_scale": constants.DEFAULT_LAMBDA_SCALE,
            "seed": constants.DEFAULT_SEED,
            "jobs": constants.DEFAULT_JOBS,
            "folds": constants.DEFAULT_FOLDS,
            "inner_folds": constants.DEFAULT_INNER_FOLDS,
            "selection_metric": constants.DEFAULT_SELECTION_METRIC,
            "output_format": constants.DEFAULT_OUTPUT_FORMAT,
            "alpha_grid": list(constants.DEFAULT_ALPHA_GRID),
            "lambda2_grid": list(constants.DEFAULT_LAMBDA2_GRID),
        }

    def _load_settings(self) -> Dict[str, Any]:
        """Loads settings from the JSON file, merged over the defaults."""
        defaults = self.defaults()

        if not self.filepath.exists():
            if self._explicit_file:
                raise DataFormatError("settings file not found", path=str(self.filepath))
            log_debug(f"No settings file at {self.filepath}; using built-in defaults.")
            return defaults

        loaded_settings_raw = load_json_file(self.filepath, default=None)
        if not isinstance(loaded_settings_raw, dict):
            raise DataFormatError("settings file is corrupt or not a JSON object", path=str(self.filepath))

        unknown = sorted(set(loaded_settings_raw) - set(defaults))
        if unknown:
            log_warning(f"Ignoring unknown settings keys in {self.filepath}: {', '.join(unknown)}")

        merged_settings = defaults.copy()
        merged_settings.update({k: v for k, v in loaded_settings_raw.items() if k in defaults})
        log_info(f"Settings loaded from {self.filepath}")
        return merged_settings

    def get_setting(self, key: str, default: Any = None) -> Any:
        return self.settings.get(key, default)

    def set_setting(self, key: str, value: Any):
        """Sets a setting value by key. None leaves the current value untouched."""
        if value is None:
            return
        if key == "logging_enabled" and self.settings.get(key) != value:
            set_logging_enabled(bool(value))
        self.settings[key] = value

    def get_all_settings(self) -> Dict[str, Any]:
        """Returns a copy of all current settings."""
        return self.settings.copy()

    # --- Typed views ---

    def admm_settings(self) -> AdmmSettings:
        return self._validated(AdmmSettings, dict(
            rho=self.settings["rho"],
            tol_abs=self.settings["admm_tol_abs"],
            tol_rel=self.settings["admm_tol_rel"],
            max_iter=self.settings["admm_max_iter"],
            lambda_override=self.settings["lambda_override"],
            lambda_scale=self.settings["lambda_scale"],
        ))

    def trainer_config(self) -> TrainerConfig:
        return self._validated(TrainerConfig, dict(
            lambda1=self.settings["lambda1"],
            lambda2=self.settings["lambda2"],
            alpha=self.settings["alpha"],
            outer_tol=self.settings["outer_tol"],
            max_outer_iter=self.settings["max_outer_iter"],
            admm=self.admm_settings(),
        ))

    def grid(self) -> Grid:
        return self._validated(Grid, dict(
            alphas=self.settings["alpha_grid"],
            lambda2s=self.settings["lambda2_grid"],
            lambda1=self.settings["lambda1"],
        ))

    def _validated(self, model, values: Dict[str, Any]):
        try:
            return model(**values)
        except ValidationError as e:
            first = e.errors()[0]
            where = ".".join(str(p) for p in first.get("loc", ())) or model.__name__
            source = str(self.filepath) if self.filepath.exists() else None
            raise DataFormatError(f"invalid setting {where}: {first.get('msg')}", path=source) from e
