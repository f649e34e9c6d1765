"""
Configuration for shlrkit.

Effective settings are resolved in this order: command-line flag, then
``SHLRKIT_*`` environment variable, then the model file's ``config`` block,
then the defaults below.
"""

import os
from dataclasses import dataclass
from typing import Any, Mapping, Optional, Tuple

from shlrkit.errors import ArgumentError

DEFAULT_WEIGHT_CUTOFF = 4
DEFAULT_DEGREE_WINDOW = (-6, 2)
DEFAULT_SEED = 0
DEFAULT_BASE_LENGTH = 3
DEFAULT_MAX_SOLVE_DIM = 20000
DEFAULT_LEIBNIZ_TRIALS = 25

ENV_PREFIX = "SHLRKIT_"
OUTPUT_FORMATS = ("json", "text")
DEFAULT_OUTPUT = "json"
REPORT_SCHEMA = 1


@dataclass(frozen=True)
class Settings:
    weight_cutoff: int = DEFAULT_WEIGHT_CUTOFF
    degree_window: Tuple[int, int] = DEFAULT_DEGREE_WINDOW
    seed: int = DEFAULT_SEED
    output: str = DEFAULT_OUTPUT
    base_length: int = DEFAULT_BASE_LENGTH
    max_solve_dim: int = DEFAULT_MAX_SOLVE_DIM

    def as_dict(self) -> dict:
        return {
            "base_length": self.base_length,
            "degree_window": f"{self.degree_window[0]}:{self.degree_window[1]}",
            "max_solve_dim": self.max_solve_dim,
            "seed": self.seed,
            "weight_cutoff": self.weight_cutoff,
        }


def parse_window(text: str) -> Tuple[int, int]:
    """``"LO:HI"`` as a pair of integers."""
    lo, sep, hi = text.partition(":")
    try:
        window = (int(lo), int(hi))
    except ValueError:
        window = None
    if not sep or window is None:
        raise ArgumentError(f"degree window must look like LO:HI, got {text!r}")
    if window[0] > window[1]:
        raise ArgumentError(f"empty degree window {text!r}")
    return window


def _parse_nonnegative(key: str, text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise ArgumentError(f"{key} must be an integer, got {text!r}")
    if value < 0:
        raise ArgumentError(f"{key} must be nonnegative, got {value}")
    return value


def _parse_output(text: str) -> str:
    if text not in OUTPUT_FORMATS:
        raise ArgumentError(f"output must be one of {', '.join(OUTPUT_FORMATS)}, got {text!r}")
    return text


_ENV_PARSERS = {
    "weight_cutoff": lambda text: _parse_nonnegative("weight_cutoff", text),
    "degree_window": parse_window,
    "seed": lambda text: _parse_nonnegative("seed", text),
    "output": _parse_output,
    "base_length": lambda text: _parse_nonnegative("base_length", text),
    "max_solve_dim": lambda text: _parse_nonnegative("max_solve_dim", text),
}


def resolve_settings(
    flags: Optional[Mapping[str, Any]] = None,
    model_config: Optional[Any] = None,
    environ: Optional[Mapping[str, str]] = None,
) -> Settings:
    """Merge flags, environment and a model ``config`` block into ``Settings``.

    Args:
        flags: Values given on the command line; ``None`` means not given.
        model_config: Object with the same attribute names, such as a parsed
            ``config`` block; ``None`` attributes are skipped.
        environ: Environment to read; defaults to ``os.environ``.

    Raises:
        ArgumentError: If an environment variable does not parse.
    """
    flags = flags or {}
    environ = os.environ if environ is None else environ
    values = {}
    for key, parse in _ENV_PARSERS.items():
        value = flags.get(key)
        if value is None and f"{ENV_PREFIX}{key.upper()}" in environ:
            value = parse(environ[f"{ENV_PREFIX}{key.upper()}"])
        if value is None and model_config is not None:
            value = getattr(model_config, key, None)
        if value is not None:
            values[key] = tuple(value) if key == "degree_window" else value
    return Settings(**values)
