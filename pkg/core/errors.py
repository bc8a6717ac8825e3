# -*- coding: utf-8 -*-
"""Exception hierarchy shared by the core services and mapped to CLI exit codes."""
from typing import Optional


class CollabelError(Exception):
    """Base class for all errors raised deliberately by collabel."""


class DataFormatError(CollabelError):
    """Input file or matrix does not conform to the documented format."""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        location = ""
        if path is not None:
            location = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{location}{message}")
        self.path = path
        self.line = line


class DimensionMismatchError(DataFormatError):
    """Two inputs that must agree on a dimension do not."""


class DivergenceError(CollabelError):
    """A NaN or infinite value appeared in an iterate."""

    def __init__(self, message: str, iteration: Optional[int] = None):
        if iteration is not None:
            message = f"{message} (iteration {iteration})"
        super().__init__(message)
        self.iteration = iteration


class MetricDomainError(CollabelError):
    """A metric was requested over zero valid instances."""


class FoldTooSmallError(CollabelError):
    """A cross-validation training split holds fewer than two instances."""
