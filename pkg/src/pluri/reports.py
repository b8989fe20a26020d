"""Shared report container and deterministic JSON output."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np


@dataclass
class SuiteReport:
    """Per-trial records (dicts with a ``status`` key) plus echoed settings."""

    suite: str
    config: dict
    records: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def counts(self):
        out = {"PASS": 0, "FAIL": 0, "INCONCLUSIVE": 0}
        for r in self.records:
            out[r["status"]] += 1
        return out

    @property
    def all_pass(self):
        return bool(self.records) and all(r["status"] == "PASS" for r in self.records)

    def max_of(self, key):
        vals = [r[key] for r in self.records if r.get(key) is not None]
        return max(vals) if vals else None

    def to_dict(self):
        out = {"suite": self.suite, "config": self.config, "summary": self.counts}
        out.update(self.extra)
        out["records"] = self.records
        return out


def to_jsonable(obj):
    """Recursively convert to plain JSON types (fractions become ``"p/q"``)."""
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    return obj


class _Float17(float):
    def __repr__(self):
        if math.isnan(self) or math.isinf(self):
            # keep the output strict JSON
            return json.dumps(str(float(self)))
        return "%.17g" % float(self)


def _wrap_floats(obj):
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, float):
        return _Float17(obj)
    if isinstance(obj, dict):
        return {k: _wrap_floats(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_wrap_floats(v) for v in obj]
    return obj


def _iterencode(o, indent, level=0):
    pad = "" if indent is None else "\n" + " " * (indent * (level + 1))
    end = "" if indent is None else "\n" + " " * (indent * level)
    sep = ", " if indent is None else ","
    if isinstance(o, dict):
        if not o:
            yield "{}"
            return
        yield "{"
        for n, (k, v) in enumerate(o.items()):
            yield (sep if n else "") + pad + json.dumps(k) + ": "
            yield from _iterencode(v, indent, level + 1)
        yield end + "}"
    elif isinstance(o, list):
        if not o:
            yield "[]"
            return
        yield "["
        for n, v in enumerate(o):
            yield (sep if n else "") + pad
            yield from _iterencode(v, indent, level + 1)
        yield end + "]"
    elif isinstance(o, _Float17):
        yield repr(o)
    else:
        yield json.dumps(o)


def dumps(obj, indent=2) -> str:
    """JSON text with floats printed as ``%.17g`` and keys in insertion order."""
    return "".join(_iterencode(_wrap_floats(to_jsonable(obj)), indent)) + "\n"
