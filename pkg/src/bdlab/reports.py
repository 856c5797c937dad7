"""Deterministic JSON reports: rationals as "p/q", sorted keys, no timestamps."""
from __future__ import annotations

import dataclasses
import json
from fractions import Fraction

from .bd_core import BlockVector, GammaNode, fstr


def jsonable(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, Fraction):
        return fstr(obj)
    if isinstance(obj, int):
        return obj
    if isinstance(obj, BlockVector):
        return obj.to_dict()
    if isinstance(obj, GammaNode):
        return obj.to_dict()
    if hasattr(obj, "to_dict") and not isinstance(obj, type):
        return jsonable(obj.to_dict())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (set, frozenset)):
        return sorted(jsonable(v) for v in obj)
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if callable(obj):
        return None
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(report) -> str:
    return json.dumps(jsonable(report), sort_keys=True, indent=2) + "\n"


def write(path: str | None, report) -> str:
    text = dumps(report)
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def envelope(command: str, config: dict, result: dict) -> dict:
    return {"command": command, "config": config, "seed": config.get("seed"),
            "result": result, "pass": bool(result.get("pass", True))}
