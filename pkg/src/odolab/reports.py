"""
Report envelope and writers.

Every subcommand produces a :class:`Report`; it is rendered either as one JSON
document ``{tool_version, subcommand, config, results}`` or as CSV, where the
envelope becomes leading ``# key: value`` comment lines above a fixed-column
table. Exact numbers are always rendered as ``"a/b"`` strings.
"""

from __future__ import annotations

import io
import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field

from . import __version__
from .core.adic import AdicRational, ClopenSet, format_exact
from .core.element import Element
from .core.permutation import Permutation

__all__ = ["Report", "to_jsonable", "render_json", "render_csv", "write_report"]


class Report(BaseModel):
    subcommand: str
    config: Dict[str, Any] = Field(default_factory=dict)
    results: Dict[str, Any] = Field(default_factory=dict)
    rows: List[Dict[str, Any]] = Field(
        default_factory=list, description="Table written in CSV format"
    )

    def envelope(self) -> Dict[str, Any]:
        return {
            "tool_version": __version__,
            "subcommand": self.subcommand,
            "config": to_jsonable(self.config),
            "results": to_jsonable(self.results),
        }


def to_jsonable(value: Any) -> Any:
    """Recursively convert domain values into JSON-ready data."""
    if isinstance(value, (AdicRational, Fraction)):
        return format_exact(value)
    if isinstance(value, (Element, ClopenSet)):
        return value.to_dict()
    if isinstance(value, Permutation):
        return {"images": list(value.images)}
    if isinstance(value, BaseModel):
        return to_jsonable(dict(value))
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def render_json(report: Report) -> str:
    return json.dumps(report.envelope(), indent=2) + "\n"


def _flat_row(results: Dict[str, Any]) -> Dict[str, Any]:
    row = {}
    for key, value in to_jsonable(results).items():
        row[key] = json.dumps(value) if isinstance(value, (dict, list)) else value
    return row


def render_csv(report: Report) -> str:
    envelope = report.envelope()
    lines = [f"# tool_version: {envelope['tool_version']}", f"# subcommand: {report.subcommand}"]
    for key, value in envelope["config"].items():
        lines.append(f"# {key}: {value}")
    rows = [to_jsonable(r) for r in report.rows] or [_flat_row(report.results)]
    frame = pd.DataFrame(rows)
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, lineterminator="\n")
    return "\n".join(lines) + "\n" + buffer.getvalue()


_WRITERS: Dict[str, Callable[[Report], str]] = {
    "json": render_json,
    "csv": render_csv,
}


def write_report(report: Report, fmt: str, out: Optional[Path] = None) -> str:
    """Render ``report``; write it to ``out`` when given. Returns the text."""
    writer = _WRITERS.get(fmt)
    if writer is None:
        raise ValueError(f"unknown report format {fmt!r}")
    text = writer(report)
    if out is not None:
        Path(out).write_text(text, encoding="utf-8")
    return text
