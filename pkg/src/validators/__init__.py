"""Input validators module."""

from src.validators.input_validators import (
    ValidationError,
    validate_file_path,
    validate_positive,
    validate_nonnegative,
    validate_index,
)
from src.validators.config_file import (
    ConfigFile,
    parse_config_file,
    parse_config_mapping,
)

__all__ = [
    "ValidationError",
    "validate_file_path",
    "validate_positive",
    "validate_nonnegative",
    "validate_index",
    "ConfigFile",
    "parse_config_file",
    "parse_config_mapping",
]
