"""
Validated run configurations of the command line tools. Simulation configs
are flat YAML files; flags given on the command line override file values.
"""

from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from rdplab.info_measures import DEFAULT_P_LIMSUP_EPS
from rdplab.nletter_oracle import DEFAULT_GRID_RESOLUTION
from rdplab.rdp_solvers import DEFAULT_MULTISTART_STARTS
from rdplab.utils import parse_range

__all__ = [
    "SCHEMA_VERSION",
    "SimulationConfig",
    "CurveConfig",
    "SpectrumConfig",
    "OracleCheckConfig",
    "load_simulation_config",
]

SCHEMA_VERSION = 1


def _as_grid(value: Union[str, float, List[float]]) -> List[float]:
    if isinstance(value, list):
        return [float(entry) for entry in value]
    return parse_range(value)


class SimulationConfig(BaseModel):
    """
    One coding simulation. The seed has no default, every run names its
    randomness.
    """

    model_config = ConfigDict(extra="forbid")

    source: str
    channel: str = "identity"
    per_letter_product: bool = Field(
        default=True,
        description="apply a single-letter channel letter by letter on n-blocks",
    )
    distortion: str = "hamming"
    n: int = Field(default=1, ge=1)
    trials: int = Field(default=10_000, ge=1)
    k: int = Field(default=2, ge=2, description="code alphabet size")
    seed: int
    mode: Literal["va", "fa"] = "va"
    codebook_size: Optional[int] = Field(default=None, ge=1)
    eps: float = Field(default=DEFAULT_P_LIMSUP_EPS, gt=0.0, lt=1.0)
    workers: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def check_fixed_length_codebook(self) -> "SimulationConfig":
        if self.mode == "fa" and self.codebook_size is None:
            raise ValueError("fixed-length runs need codebook_size")
        return self

    def hashed_fields(self) -> Dict[str, Any]:
        """
        :return: the fields that determine the output, worker count excluded
        """
        return self.model_dump(exclude={"workers"})


class CurveConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    source: str
    distortion: str = "hamming"
    d_grid: List[float]
    s_grid: List[float]
    base: float = Field(default=2.0, gt=1.0)
    method: Literal["auto", "exact", "grid", "multistart"] = "auto"
    va_n: int = Field(default=1, ge=1)
    fa_n: Optional[int] = Field(default=None, ge=1)
    eps: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    starts: int = Field(default=DEFAULT_MULTISTART_STARTS, ge=1)
    seed: int = 0

    @field_validator("d_grid", "s_grid", mode="before")
    def validate_grid(cls, value: Union[str, float, List[float]]) -> List[float]:
        return _as_grid(value)

    @field_validator("s_grid")
    def validate_s_grid(cls, value: List[float]) -> List[float]:
        if any(not 0.0 <= entry <= 1.0 for entry in value):
            raise ValueError(f"perception levels must lie in [0, 1], given {value}")
        return value

    @field_validator("d_grid")
    def validate_d_grid(cls, value: List[float]) -> List[float]:
        if any(entry < 0.0 for entry in value):
            raise ValueError(f"distortion levels must be >= 0, given {value}")
        return value


class SpectrumConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    source: str
    n: int = Field(ge=1)
    r_grid: List[float]
    base: float = Field(default=2.0, gt=1.0)
    mode: Literal["exact", "mc"] = "exact"
    trials: int = Field(default=100_000, ge=1)
    seed: Optional[int] = None

    @field_validator("r_grid", mode="before")
    def validate_grid(cls, value: Union[str, float, List[float]]) -> List[float]:
        return _as_grid(value)

    @model_validator(mode="after")
    def check_seed(self) -> "SpectrumConfig":
        if self.mode == "mc" and self.seed is None:
            raise ValueError("Monte Carlo spectra need an explicit seed")
        return self


class OracleCheckConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    source: str
    distortion: str = "hamming"
    d_grid: List[float]
    s_grid: List[float]
    resolution: float = Field(default=DEFAULT_GRID_RESOLUTION, gt=0.0, le=1.0)
    tol: float = Field(default=2e-3, gt=0.0)
    deterministic: bool = False

    @field_validator("d_grid", "s_grid", mode="before")
    def validate_grid(cls, value: Union[str, float, List[float]]) -> List[float]:
        return _as_grid(value)


def load_simulation_config(
    path: Optional[Union[str, Path]] = None, **overrides: Any
) -> SimulationConfig:
    """
    :param path: optional flat YAML file of SimulationConfig fields
    :param overrides: field values taking precedence over the file, None
        values are ignored
    :return: the validated configuration
    """
    values: Dict[str, Any] = {}
    if path is not None:
        with open(path, "r") as file:
            loaded = yaml.safe_load(file) or {}
        if not isinstance(loaded, dict):
            raise ValueError(f"{path} must hold a flat key: value mapping")
        values.update(loaded)

    values.update({key: value for key, value in overrides.items() if value is not None})
    return SimulationConfig.model_validate(values)
