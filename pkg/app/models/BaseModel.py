from dataclasses import fields, is_dataclass
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np
import orjson


def to_plain(value: Any) -> Any:
    """Convert numpy arrays, scalars, enums and nested models to JSON-ready values."""
    if isinstance(value, BaseModelMixin):
        return value.to_dict()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, float) and not np.isfinite(value):
        return None
    return value


class BaseModelMixin:
    """Serialization shared by the dataclass models."""

    def to_dict(self, exclude: Optional[List[str]] = None) -> Dict[str, Any]:
        if exclude is None:
            exclude = []

        data = {}
        if not is_dataclass(self):
            return data
        for field in fields(self):
            if field.name in exclude or not field.repr:
                continue
            value = getattr(self, field.name)
            if callable(value) and not isinstance(value, BaseModelMixin):
                continue
            data[field.name] = to_plain(value)
        return data

    def to_json(self, exclude: Optional[List[str]] = None) -> bytes:
        return orjson.dumps(self.to_dict(exclude), option=orjson.OPT_SORT_KEYS)
