"""Canonical JSON emission shared by every file format in the package.

Two serializations of equal data must be byte-identical, so all writers
funnel through :func:`dumps_canonical`: dict keys keep insertion order,
numbers carry at most 4 decimal places, and there is no trailing
whitespace anywhere.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from typing import Any


def format_number(x: float) -> str:
    """Render a number with <= 4 decimal places, integers without a point."""
    if isinstance(x, bool):  # bool is an int subclass; never treat as number here
        raise TypeError("booleans are not numbers")
    if not math.isfinite(x):
        raise ValueError(f"non-finite number not serializable: {x!r}")
    q = round(float(x), 4)
    if q == 0.0:
        q = 0.0  # normalize -0.0
    if q == int(q) and abs(q) < 1e15:
        return str(int(q))
    s = f"{q:.4f}".rstrip("0")
    return s


def _write(obj: Any, parts: list[str]) -> None:
    if obj is None:
        parts.append("null")
    elif obj is True:
        parts.append("true")
    elif obj is False:
        parts.append("false")
    elif isinstance(obj, str):
        parts.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, (int, float)):
        parts.append(format_number(obj))
    elif isinstance(obj, (list, tuple)):
        parts.append("[")
        for i, item in enumerate(obj):
            if i:
                parts.append(",")
            _write(item, parts)
        parts.append("]")
    elif isinstance(obj, dict):
        parts.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                parts.append(",")
            parts.append(json.dumps(str(k), ensure_ascii=False))
            parts.append(":")
            _write(v, parts)
        parts.append("}")
    else:
        raise TypeError(f"not canonically serializable: {type(obj).__name__}")


def dumps_canonical(obj: Any) -> str:
    """Serialize to compact canonical JSON with a trailing newline."""
    parts: list[str] = []
    _write(obj, parts)
    parts.append("\n")
    return "".join(parts)


def atomic_write_text(path: str, text: str) -> None:
    """Write a file atomically (tempfile + rename in the target directory)."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
