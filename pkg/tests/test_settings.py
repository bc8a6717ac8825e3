# -*- coding: utf-8 -*-
import json

import pytest

from core.errors import DataFormatError
from core.settings_service import SettingsService
from utils import constants


def _settings_file(tmp_path, data) -> SettingsService:
    path = tmp_path / "settings.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    return SettingsService(path)


def test_defaults_without_file():
    service = SettingsService()
    config = service.trainer_config()
    assert config.alpha == constants.DEFAULT_ALPHA
    assert config.lambda1 == constants.DEFAULT_LAMBDA1
    assert config.admm.rho == constants.DEFAULT_RHO
    assert service.grid().alphas == list(constants.DEFAULT_ALPHA_GRID)


def test_file_overrides_defaults(tmp_path):
    service = _settings_file(tmp_path, {"lambda2": 0.02, "admm_max_iter": 50, "alpha_grid": [0.0, 1.0]})
    assert service.trainer_config().lambda2 == 0.02
    assert service.admm_settings().max_iter == 50
    assert service.grid().alphas == [0.0, 1.0]
    assert service.get_setting("seed") == constants.DEFAULT_SEED


def test_unknown_keys_are_ignored(tmp_path):
    service = _settings_file(tmp_path, {"alhpa": 0.9})
    assert "alhpa" not in service.get_all_settings()
    assert service.trainer_config().alpha == constants.DEFAULT_ALPHA


def test_explicit_missing_file(tmp_path):
    with pytest.raises(DataFormatError, match="not found"):
        SettingsService(tmp_path / "absent.json")


def test_non_object_file(tmp_path):
    with pytest.raises(DataFormatError):
        _settings_file(tmp_path, [1, 2, 3])


def test_invalid_value_names_the_setting(tmp_path):
    service = _settings_file(tmp_path, {"alpha": 2.0})
    with pytest.raises(DataFormatError, match="alpha"):
        service.trainer_config()


def test_none_leaves_value_untouched(tmp_path):
    service = _settings_file(tmp_path, {"lambda1": 3.0})
    service.set_setting("lambda1", None)
    assert service.get_setting("lambda1") == 3.0
    service.set_setting("lambda1", 0.5)
    assert service.trainer_config().lambda1 == 0.5


def test_overrides_never_touch_the_settings_file(tmp_path):
    service = _settings_file(tmp_path, {"lambda1": 3.0})
    before = (tmp_path / "settings.json").read_bytes()
    service.set_setting("lambda1", 0.5)
    assert (tmp_path / "settings.json").read_bytes() == before
    assert not hasattr(service, "save_settings")
