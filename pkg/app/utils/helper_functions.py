from typing import List, Tuple

import numpy as np

from app.utils.exceptions import ConfigurationError


def parse_float_list(text: str) -> List[float]:
    try:
        return [float(part) for part in text.replace(" ", "").split(",") if part != ""]
    except ValueError:
        raise ConfigurationError(f"Expected comma-separated numbers, got '{text}'")


def parse_int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.replace(" ", "").split(",") if part != ""]
    except ValueError:
        raise ConfigurationError(f"Expected comma-separated integers, got '{text}'")


def parse_spec_string(text: str) -> Tuple[str, List[str]]:
    """Split ``name:group;group;...`` into the name and its parameter groups."""
    if not text:
        raise ConfigurationError("Empty function spec")
    name, _, rest = text.strip().partition(":")
    groups = [group for group in rest.split(";")] if rest else []
    return name.strip().lower(), groups


def parse_ladder(text: str) -> Tuple[str, List[int]]:
    """``q=8,12,16,24`` or ``samples=1000,4000`` -> (key, values)."""
    key, sep, values = text.partition("=")
    if not sep:
        raise ConfigurationError(f"Ladder must look like q=8,12,16: got '{text}'")
    key = key.strip().lower()
    if key not in ("q", "samples"):
        raise ConfigurationError(f"Ladder key must be q or samples, got '{key}'")
    parsed = parse_int_list(values)
    if not parsed:
        raise ConfigurationError("Ladder is empty")
    return key, parsed


def parse_element(text_or_values, dim: int) -> np.ndarray:
    """A single number means a real multiple of 1; otherwise a full coefficient vector."""
    values = parse_float_list(text_or_values) if isinstance(text_or_values, str) else list(text_or_values)
    if len(values) == 1:
        element = np.zeros(dim)
        element[0] = values[0]
        return element
    if len(values) != dim:
        raise ConfigurationError(f"Element needs 1 or {dim} coefficients, got {len(values)}")
    return np.asarray(values, dtype=float)

