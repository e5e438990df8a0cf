"""JSON encoding for reports.

Every float is written rounded to 6 significant digits, with the exact
value alongside as a hex string under ``<key>_hex``; artifacts are therefore
readable and still diffable bit-for-bit.
"""
from __future__ import annotations

import json
import math
from importlib import resources

import numpy as np


def round6(x: float):
    if x is None or not math.isfinite(x):
        return None
    return float(f"{x:.6g}")


def hexf(x: float):
    if x is None or not math.isfinite(x):
        return None
    return float(x).hex()


def _is_float(v):
    return isinstance(v, (float, np.floating)) and not isinstance(v, bool)


def encode(obj):
    """Recursively attach ``_hex`` siblings to float fields and float lists."""
    if isinstance(obj, dict):
        out = {}
        for k, v in obj.items():
            if isinstance(v, np.ndarray):
                v = v.tolist()
            if _is_float(v):
                out[k] = round6(float(v))
                out[f"{k}_hex"] = hexf(float(v))
            elif isinstance(v, list) and v and all(_is_float(x) for x in v):
                out[k] = [round6(float(x)) for x in v]
                out[f"{k}_hex"] = [hexf(float(x)) for x in v]
            elif isinstance(v, list) and v and all(isinstance(x, list) for x in v) and all(
                    _is_float(y) for x in v for y in x):
                out[k] = [[round6(float(y)) for y in x] for x in v]
                out[f"{k}_hex"] = [[hexf(float(y)) for y in x] for x in v]
            else:
                out[k] = encode(v)
        return out
    if isinstance(obj, (list, tuple)):
        return [encode(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if _is_float(obj):
        return round6(float(obj))
    return obj


def dumps(obj) -> str:
    return json.dumps(encode(obj), indent=2, ensure_ascii=False) + "\n"


def load_schema(name: str) -> dict:
    text = resources.files("dying_channels").joinpath("schemas", f"{name}.json").read_text()
    return json.loads(text)


SCHEMA_NAMES = ("optimization_report", "certificate", "evaluation",
                "simulation_result", "comparison", "sweep", "error")
