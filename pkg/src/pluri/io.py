"""Field and flower files."""

from __future__ import annotations

import json
from pathlib import Path

from .forms import FieldAssignment
from .reports import dumps


def parse_point(key: str) -> tuple:
    return tuple(int(c) for c in key.split(","))


def field_from_dict(d: dict) -> FieldAssignment:
    """``{"0,1,0": 0.5, ..., "seed": 7}``; ``seed`` enables lazy extension."""
    seed = d.get("seed")
    values = {parse_point(k): float(v) for k, v in d.items() if k != "seed"}
    return FieldAssignment(values, extension_seed=None if seed is None else int(seed))


def field_to_dict(values: dict, seed=None) -> dict:
    out = {",".join(str(c) for c in p): float(v) for p, v in sorted(values.items())}
    if seed is not None:
        out["seed"] = int(seed)
    return out


def load_field(path) -> FieldAssignment:
    return field_from_dict(json.loads(Path(path).read_text()))


def load_flowers(path) -> list:
    """A single flower object, a list of them, or ``{"flowers": [...]}``."""
    from .flower import Flower

    data = json.loads(Path(path).read_text())
    if isinstance(data, dict) and "flowers" in data:
        data = data["flowers"]
    if isinstance(data, dict):
        data = [data]
    return [(d.get("name", f"flower-{n}"), Flower.from_dict(d)) for n, d in enumerate(data)]


def write_json(obj, path=None) -> str:
    text = dumps(obj)
    if path is not None:
        Path(path).write_text(text)
    return text
