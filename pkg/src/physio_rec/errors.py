"""Exception hierarchy shared by every module of the engine."""

from __future__ import annotations


class PhysioRecError(Exception):
    """Base class for all engine errors."""


class ContractError(PhysioRecError, ValueError):
    """A caller violated an operation precondition."""


class ConfigError(PhysioRecError, ValueError):
    """Invalid configuration or calibration parameters."""


class ParseError(PhysioRecError, ValueError):
    """A record in a line-delimited file could not be decoded."""

    def __init__(self, line: int, message: str) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


class SensorValidationError(PhysioRecError, ValueError):
    """A sensor value is outside its channel's admissible range."""

    def __init__(self, channel: str, bound: str, value: float, line: int | None = None) -> None:
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{channel} value {value!r} violates bound {bound}")
        self.channel = channel
        self.bound = bound
        self.value = value
        self.line = line


class SchemaError(PhysioRecError, ValueError):
    """A persisted artifact does not match its expected schema."""

    def __init__(self, field: str, message: str) -> None:
        super().__init__(f"{field}: {message}")
        self.field = field
