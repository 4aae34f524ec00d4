"""Deterministic text output: JSON and CSV with floats at 17 significant digits."""

from __future__ import annotations

import json
import math

import numpy as np

__all__ = ["fmt", "dumps", "csv_line"]


def fmt(x) -> str:
    """``%.17g`` for finite floats; ``nan``/``inf``/``-inf`` otherwise (CSV)."""
    x = float(x)
    if math.isfinite(x):
        return "%.17g" % x
    return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")


def _enc(obj, ind, lvl):
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return "null" if obj is None else ("true" if obj else "false")
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, (complex, np.complexfloating)):
        return _enc({"re": obj.real, "im": obj.imag}, ind, lvl)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    pad, inner = "\n" + ind * lvl, "\n" + ind * (lvl + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {_enc(v, ind, lvl + 1)}" for k, v in obj.items()]
        return "{" + ",".join(items) + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if not len(obj):
            return "[]"
        return "[" + ",".join(inner + _enc(v, ind, lvl + 1) for v in obj) + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """JSON text; non-finite floats become null, complex numbers {re, im}."""
    return _enc(obj, " " * indent, 0) + "\n"


def csv_line(fields) -> str:
    return ",".join(f if isinstance(f, str) else fmt(f) for f in fields) + "\n"
