"""Element, clopen-set and permutation loading helpers for odolab.

Each ``parse_*`` function accepts either inline JSON (text starting with
``{``) or a path to a JSON file. Inputs may be non-canonical; the returned
objects are canonical.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, Union

from .core.adic import ClopenSet
from .core.element import Element, identity, odometer
from .core.permutation import Permutation

__all__ = [
    "load_json",
    "parse_element",
    "parse_clopen",
    "parse_permutation",
]

_PathLike = Union[str, Path]


def _validate_file_path(path: _PathLike) -> Path:
    """Return a *Path* after validating emptiness and existence."""
    if isinstance(path, str) and path.strip() == "":
        raise ValueError("input cannot be empty")
    file_path = Path(path).expanduser()
    if not file_path.exists():
        raise FileNotFoundError(f"input file not found: {file_path}")
    return file_path


def load_json(source: _PathLike) -> Dict[str, Any]:
    """Decode inline JSON or a JSON file into a mapping.

    Raises ``json.JSONDecodeError`` (with line and column) on malformed text.
    """
    if isinstance(source, str) and source.lstrip().startswith("{"):
        text = source
    else:
        text = _validate_file_path(source).read_text(encoding="utf-8")
    data = json.loads(text)
    if not isinstance(data, dict):
        raise ValueError("expected a JSON object")
    return data


def parse_element(source: _PathLike, base: int = 2) -> Element:
    """Load an Element; ``id`` and ``T`` name the identity and odometer of ``base``."""
    if source == "id":
        return identity(base)
    if source == "T":
        return odometer(base)
    return Element.model_validate(load_json(source)).normalize()


def parse_clopen(source: _PathLike) -> ClopenSet:
    return ClopenSet.model_validate(load_json(source)).normalize()


def parse_permutation(source: _PathLike) -> Permutation:
    return Permutation.model_validate(load_json(source))
