from __future__ import annotations

"""
Error hierarchy shared by the numerics, the CLI and the HTTP layer.

Every error carries the process exit code the CLI returns for it.
"""

from typing import Optional


class SimulatorError(Exception):
    exit_code: int = 1

    def __init__(self, message: str, *, field: Optional[str] = None) -> None:
        super().__init__(message)
        self.field = field


class ConfigSchemaError(SimulatorError):
    """Malformed config document, unknown key or wrong value type."""


class ConfigValidationError(SimulatorError):
    """A config value is outside its allowed range."""


class DimensionError(SimulatorError, ValueError):
    pass


class SchedulingError(SimulatorError):
    """Pilot capacity exceeded or class bound violated."""

    exit_code = 2


class EstimationError(SimulatorError):
    pass


class SimilarityError(SimulatorError, ValueError):
    pass


class EmptyTableError(SimulatorError, ValueError):
    pass


class OutputError(SimulatorError):
    exit_code = 3
