# -*- coding: utf-8 -*-
import json
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, Optional

import numpy as np

from .constants import FLOAT_FORMAT
from .logger import log_error, log_warning, log_debug


def load_json_file(file_path: Path, default: Any = None) -> Any:
    """Safely loads data from a JSON file. Handles non-existent and empty files."""
    if not file_path.exists():
        log_warning(f"JSON file not found: {file_path}. Returning default.")
        return default

    try:
        if file_path.stat().st_size == 0:
            log_warning(f"JSON file is empty: {file_path}. Returning default.")
            return default

        with file_path.open('r', encoding='utf-8') as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        log_error(f"Error decoding JSON file {file_path}: {e}. File might be corrupted.", exc_info=False)
        return default
    except OSError as e:
        log_error(f"OS error loading JSON file {file_path}: {e}")
        return default


def atomic_write_text(file_path: Path, text: str) -> Path:
    """
    Writes text to file_path through a temporary file in the same directory
    followed by a rename, so readers never observe a partially written file.
    Raises OSError on failure (the temporary file is removed).
    """
    file_path = Path(file_path)
    file_path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{file_path.name}.", suffix=".tmp", dir=file_path.parent)
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='\n') as f:
            f.write(text)
        os.replace(tmp_name, file_path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise
    log_debug(f"Wrote {file_path}")
    return file_path


def write_json_file(file_path: Path, data: Any) -> Path:
    """Writes data as indented JSON, atomically. Raises OSError when the file cannot be written."""
    return atomic_write_text(file_path, json.dumps(data, indent=4, ensure_ascii=False) + "\n")


def format_row(values: Iterable[Any], fmt: str = FLOAT_FORMAT, delimiter: str = ",") -> str:
    """Formats one matrix row; fmt is a printf-style format applied to each value."""
    return delimiter.join(fmt % v for v in values)


def format_matrix(matrix: np.ndarray, fmt: str = FLOAT_FORMAT, delimiter: str = ",",
                  header: Optional[str] = None) -> str:
    """Renders a 2-D array as delimiter-separated text, one row per line."""
    matrix = np.atleast_2d(np.asarray(matrix))
    lines = [header] if header else []
    lines.extend(format_row(row, fmt, delimiter) for row in matrix)
    return "\n".join(lines) + "\n" if lines else ""


def write_matrix(file_path: Path, matrix: np.ndarray, fmt: str = FLOAT_FORMAT,
                 header: Optional[str] = None) -> Path:
    """Writes a matrix as full-precision comma separated text (atomically)."""
    return atomic_write_text(file_path, format_matrix(matrix, fmt=fmt, header=header))
