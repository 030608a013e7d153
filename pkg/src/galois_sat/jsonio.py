"""JSON output with every float written to 17 significant digits."""

from __future__ import annotations

import json
import math

import numpy as np


def _norm(obj):
    if isinstance(obj, dict):
        return {str(k): _norm(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_norm(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _norm(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [_norm(float(obj.real)), _norm(float(obj.imag))]
    if isinstance(obj, (float, np.floating)):
        return _Float(float(obj))
    return obj


class _Float(float):
    pass


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, _Float):
        return f"{obj:.17g}" if math.isfinite(obj) else "null"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    return json.dumps(obj)


def dumps17(obj, indent: int = 2) -> str:
    """Serialise ``obj``; floats use ``%.17g``, complex numbers become
    ``[re, im]`` pairs and non-finite floats become ``null``."""
    return _encode(_norm(obj), indent, 0)
