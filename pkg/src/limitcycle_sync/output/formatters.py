"""Table / JSON / YAML output dispatch."""

from __future__ import annotations

import json
import math
from collections.abc import Callable
from typing import Any

import numpy as np
import yaml
from rich.console import Console, RenderableType

console = Console()
err_console = Console(stderr=True)


def to_plain(value: Any) -> Any:
    """Recursively convert numpy scalars/arrays and complex numbers to YAML/JSON-safe values."""
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_plain(v) for v in value.tolist()]
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": float(value.real), "im": float(value.imag)}
    if isinstance(value, np.generic):
        return value.item()
    return value


def _json_safe(value: Any) -> Any:
    plain = to_plain(value)
    if isinstance(plain, dict):
        return {k: _json_safe(v) for k, v in plain.items()}
    if isinstance(plain, list):
        return [_json_safe(v) for v in plain]
    if isinstance(plain, float) and not math.isfinite(plain):
        return None
    return plain


def emit(data: dict[str, Any], fmt: str, table: Callable[[], RenderableType | list[RenderableType]]) -> None:
    if fmt == "json":
        console.print_json(json.dumps(_json_safe(data), indent=2))
    elif fmt == "yaml":
        console.print(yaml.safe_dump(to_plain(data), sort_keys=False), markup=False, highlight=False)
    else:
        rendered = table()
        for item in rendered if isinstance(rendered, list) else [rendered]:
            console.print(item)
