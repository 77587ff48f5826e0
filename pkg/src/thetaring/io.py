"""Locating and loading shipped fixtures and user files."""
from __future__ import annotations

import json
import os
from pathlib import Path

from .invariants import InvariantTable
from .scenario import Geometry, InputError, geometry_from_json

DATA_DIR = Path(os.environ.get("THETARING_DATA", Path(__file__).with_name("data")))


def resolve(name_or_path: str, suffix: str = ".json") -> Path:
    p = Path(name_or_path)
    if p.exists():
        return p
    q = DATA_DIR / (name_or_path if name_or_path.endswith(suffix) else name_or_path + suffix)
    if q.exists():
        return q
    raise InputError(f"no such file or fixture: {name_or_path}")


def read_json(name_or_path: str):
    path = resolve(name_or_path)
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: {e}") from e


def load_geometry(name_or_path: str) -> Geometry:
    return geometry_from_json(read_json(name_or_path))


def load_table(name_or_path: str, geom: Geometry, policy: str = "strict") -> InvariantTable:
    path = resolve(name_or_path, ".jsonl")
    return InvariantTable.from_lines(path.read_text().splitlines(), geom, policy)


def load_presentation(name_or_path: str, geom: Geometry):
    from .presentation import presentation_from_json
    return presentation_from_json(geom, read_json(name_or_path))
