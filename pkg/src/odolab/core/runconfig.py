"""
Pydantic run configuration for the odolab command line.

A ``RunConfig`` can be loaded from a YAML file (``--config``) and is then
overridden by whatever flags were given explicitly.
"""

from pathlib import Path
from typing import Any, Dict, Literal, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field

from ..utils.env import DEFAULT_LEVEL_CAP

OutputFormat = Literal["json", "csv"]


class RunConfig(BaseModel):
    """Settings shared by every subcommand."""

    subcommand: Optional[str] = Field(None, description="Subcommand being run")
    base: int = Field(2, ge=2, description="Odometer base q")
    level_cap: int = Field(DEFAULT_LEVEL_CAP, ge=0, description="Largest level materialized")
    seed: int = Field(0, ge=0, description="Seed for every random draw")
    samples: int = Field(10000, ge=1, description="Monte Carlo sample count")
    budget: int = Field(8, ge=0, description="Greedy search step budget")
    out: Optional[Path] = Field(None, description="Report path; stdout when absent")
    format: OutputFormat = Field("json", description="Report format")

    model_config = ConfigDict(extra="forbid")

    @classmethod
    def from_yaml(cls, yaml_str: str) -> "RunConfig":
        """Create a RunConfig from a YAML mapping."""
        try:
            data = yaml.safe_load(yaml_str) or {}
        except yaml.YAMLError as e:
            raise ValueError(f"Invalid YAML: {e}")
        if not isinstance(data, dict):
            raise ValueError("run configuration must be a YAML mapping")
        return cls.model_validate(data)

    @classmethod
    def from_file(cls, file_path: Union[str, Path]) -> "RunConfig":
        """
        Create a RunConfig from a YAML file.

        Raises:
            FileNotFoundError: If the file doesn't exist
            ValueError: If the YAML is invalid or has unknown keys
        """
        file_path = Path(file_path)
        if not file_path.exists():
            raise FileNotFoundError(f"Configuration file not found: {file_path}")
        return cls.from_yaml(file_path.read_text(encoding="utf-8"))

    def with_overrides(self, **overrides: Any) -> "RunConfig":
        """Copy with every non-None override applied."""
        updates = {k: v for k, v in overrides.items() if v is not None and k in type(self).model_fields}
        return self.model_validate({**self.model_dump(), **updates})

    def to_dict(self) -> Dict[str, Any]:
        data = self.model_dump()
        data["out"] = str(self.out) if self.out is not None else None
        return data
