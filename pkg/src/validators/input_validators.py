"""Validation of user-supplied values, paths and indices."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Any


class ValidationError(Exception):
    """Raised when input validation fails."""

    def __init__(self, message: str, field: str | None = None) -> None:
        self.field = field
        self.message = message
        super().__init__(f"Validation error{f' for {field}' if field else ''}: {message}")


def validate_file_path(
        file_path: Any,
        must_exist: bool = True,
        allowed_extensions: tuple[str, ...] | None = None,
        field: str = "file_path",
) -> Path:
    """
    Check an instance, matching or config file path.

    Args:
        file_path: str or Path
        must_exist: Require an existing regular file
        allowed_extensions: Lower-case suffixes accepted, e.g. ``(".json",)``
        field: Name reported in the error

    Raises:
        ValidationError: On a wrong type, a missing file or a wrong suffix
    """
    if not isinstance(file_path, (str, Path)):
        raise ValidationError(f"expected a path, got {type(file_path).__name__}", field)

    path = Path(file_path)
    if allowed_extensions and path.suffix.lower() not in allowed_extensions:
        raise ValidationError(
            f"{path.name} has suffix '{path.suffix}', expected one of {', '.join(allowed_extensions)}", field
        )
    if must_exist and not path.is_file():
        raise ValidationError(f"no such file: {path}", field)

    return path


def validate_positive(value: Any, field: str) -> float:
    """
    Validate a strictly positive finite number.

    Raises:
        ValidationError: If the value is not a positive finite number
    """
    try:
        number = float(value)
    except (TypeError, ValueError) as e:
        raise ValidationError(
            f"must be a number, got {type(value).__name__}", field
        ) from e

    if not math.isfinite(number) or number <= 0:
        raise ValidationError(f"must be positive and finite, got {number}", field)

    return number


def validate_nonnegative(value: Any, field: str) -> float:
    """Validate a nonnegative finite number."""
    try:
        number = float(value)
    except (TypeError, ValueError) as e:
        raise ValidationError(
            f"must be a number, got {type(value).__name__}", field
        ) from e

    if not math.isfinite(number) or number < 0:
        raise ValidationError(f"must be nonnegative and finite, got {number}", field)

    return number


def validate_index(value: Any, size: int, field: str) -> int:
    """
    Validate a user index against the size of its side of the market.

    Args:
        value: Candidate index
        size: Number of users on that side
        field: Name reported in the error

    Returns:
        The index as int

    Raises:
        ValidationError: If the index is not an integer in [0, size)
    """
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(
            f"must be an integer, got {type(value).__name__}", field
        )

    if not 0 <= value < size:
        raise ValidationError(f"index {value} out of range [0, {size})", field)

    return value
