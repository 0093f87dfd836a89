"""
Run configuration: a JSON document describing one verification run.

Example:
    {
        "mode": "bounds",
        "dimension": 1,
        "resolution": 64,
        "A": {"kind": "laminate", "phases": [1.0, 4.0], "fraction": 0.5},
        "B": {"kind": "laminate", "phases": [2.0, 1.0], "fraction": 0.5},
        "solver": {"tol": 1e-10, "discretization": "fd-harmonic"},
        "twoscale": {"factor": "2", "mode": "t"},
        "converge": {"eps": ["1/8", "1/16", "1/32", "1/64", "1/128"]}
    }

Flags on the command line override the file; environment defaults fill the rest.
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional

from blochhomog.config import get_config
from blochhomog.core.constants import DISCRETIZATIONS, MODES, SUPPORTED_DIMENSIONS
from blochhomog.core.models import SolverConfig
from blochhomog.exceptions import BlochHomogError, ConfigurationError
from blochhomog.microstructure.presets import PresetSpec
from blochhomog.tensors.twoscale import normalize_mode
from blochhomog.utils.rational import as_fraction, parse_eps

TOP_LEVEL_KEYS = {
    "mode",
    "dimension",
    "resolution",
    "A",
    "B",
    "solver",
    "twoscale",
    "bloch",
    "transform",
    "converge",
    "variational",
    "output_dir",
}

DEFAULT_EPS = [8, 16, 32, 64, 128]
DEFAULT_TRANSFORM_EPS = [8, 16, 32, 64]


def _section(data: Dict[str, Any], name: str, allowed: set) -> Dict[str, Any]:
    section = data.get(name, {}) or {}
    if not isinstance(section, dict):
        raise ConfigurationError(f"'{name}' must be an object")
    unknown = set(section) - allowed
    if unknown:
        raise ConfigurationError(f"Unknown keys in '{name}': {sorted(unknown)}")
    return section


def _positive(value: Any, name: str, kind: type = float) -> Any:
    try:
        number = kind(value)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"'{name}' must be a number, got {value!r}") from exc
    if isinstance(value, bool) or number <= 0:
        raise ConfigurationError(f"'{name}' must be positive, got {value!r}")
    return number


def _cells(values: Any, name: str) -> List[int]:
    if not isinstance(values, list) or not values:
        raise ConfigurationError(f"'{name}' must be a non-empty list")
    try:
        return [parse_eps(v).denominator for v in values]
    except BlochHomogError as exc:
        raise ConfigurationError(f"Invalid entry in '{name}': {exc.message}") from exc


@dataclass
class RunConfig:
    """Validated run configuration."""

    mode: str
    a_spec: PresetSpec
    b_spec: PresetSpec
    dimension: int = 1
    resolution: int = 64
    solver: SolverConfig = field(default_factory=SolverConfig.from_defaults)
    twoscale_factor: Optional[Fraction] = None
    twoscale_mode: str = "t"
    fd_step: float = 1e-3
    eigen_tol: float = 1e-12
    etas: List[List[float]] = field(default_factory=list)
    transform_resolution: int = 16
    transform_cells: int = 8
    transform_eps: List[int] = field(default_factory=lambda: list(DEFAULT_TRANSFORM_EPS))
    max_frequency: int = 2
    converge_eps: List[int] = field(default_factory=lambda: list(DEFAULT_EPS))
    converge_factor: Fraction = Fraction(1)
    cell_resolution: int = 32
    source: float = 1.0
    samples: int = 20
    seed: int = 0
    output_dir: Optional[str] = None

    @classmethod
    def from_dict(
        cls,
        data: Dict[str, Any],
        mode: Optional[str] = None,
        resolution: Optional[int] = None,
        tol: Optional[float] = None,
        output_dir: Optional[str] = None,
    ) -> "RunConfig":
        """Validate a parsed document; explicit arguments override its values.

        Raises:
            ConfigurationError: Unknown mode or keys, missing presets, non-positive
                numbers or malformed preset records.
        """
        if not isinstance(data, dict):
            raise ConfigurationError("Run configuration must be a JSON object")
        unknown = set(data) - TOP_LEVEL_KEYS
        if unknown:
            raise ConfigurationError(f"Unknown configuration keys: {sorted(unknown)}")

        run_mode = mode or data.get("mode")
        if run_mode not in MODES:
            raise ConfigurationError(f"Unknown mode {run_mode!r}; expected one of {MODES}")
        for key in ("A", "B"):
            if key not in data:
                raise ConfigurationError(f"Missing microstructure '{key}'")

        defaults = get_config()
        solver = _section(data, "solver", {"tol", "max_iter", "discretization", "dealias"})
        bloch = _section(data, "bloch", {"fd_step", "eigen_tol", "etas"})
        transform = _section(data, "transform", {"resolution", "cells", "eps", "max_frequency"})
        converge = _section(data, "converge", {"eps", "factor", "cell_resolution", "source"})
        variational = _section(data, "variational", {"samples", "seed"})
        twoscale = _section(data, "twoscale", {"factor", "mode"})

        try:
            a_spec = PresetSpec.from_dict(data["A"])
            b_spec = PresetSpec.from_dict(data["B"])
            discretization = solver.get("discretization", SolverConfig.mode)
            if discretization not in DISCRETIZATIONS:
                raise ConfigurationError(f"Unknown discretization {discretization!r}")
            solver_cfg = SolverConfig.from_defaults(
                tol=_positive(tol if tol is not None else solver.get("tol", defaults.solver.tol), "tol"),
                max_iter=_positive(solver.get("max_iter", defaults.solver.max_iter), "max_iter", int),
                mode=discretization,
                dealias=bool(solver.get("dealias", defaults.solver.dealias)),
            )
            factor = as_fraction(twoscale["factor"]) if "factor" in twoscale else None
            twoscale_mode = normalize_mode(twoscale.get("mode", "t"))
            converge_factor = as_fraction(converge.get("factor", 1))
        except ConfigurationError:
            raise
        except BlochHomogError as exc:
            raise ConfigurationError(f"Invalid configuration: {exc.message}") from exc

        dimension = int(_positive(data.get("dimension", 1), "dimension", int))
        if dimension not in SUPPORTED_DIMENSIONS:
            raise ConfigurationError(f"Unsupported dimension {dimension}")
        etas = bloch.get("etas", [])
        if not isinstance(etas, list) or any(not isinstance(e, list) or len(e) != dimension for e in etas):
            raise ConfigurationError("'bloch.etas' must be a list of N-vectors")

        return cls(
            mode=run_mode,
            a_spec=a_spec,
            b_spec=b_spec,
            dimension=dimension,
            resolution=_positive(resolution or data.get("resolution", 64), "resolution", int),
            solver=solver_cfg,
            twoscale_factor=factor,
            twoscale_mode=twoscale_mode,
            fd_step=_positive(bloch.get("fd_step", defaults.bloch.fd_step), "bloch.fd_step"),
            eigen_tol=_positive(bloch.get("eigen_tol", defaults.bloch.eigen_tol), "bloch.eigen_tol"),
            etas=[[float(v) for v in e] for e in etas],
            transform_resolution=_positive(transform.get("resolution", 16), "transform.resolution", int),
            transform_cells=_positive(transform.get("cells", 8), "transform.cells", int),
            transform_eps=_cells(transform.get("eps", DEFAULT_TRANSFORM_EPS), "transform.eps"),
            max_frequency=_positive(transform.get("max_frequency", 2), "transform.max_frequency", int),
            converge_eps=_cells(converge.get("eps", DEFAULT_EPS), "converge.eps"),
            converge_factor=converge_factor,
            cell_resolution=_positive(converge.get("cell_resolution", 32), "converge.cell_resolution", int),
            source=float(converge.get("source", 1.0)),
            samples=_positive(variational.get("samples", 20), "variational.samples", int),
            seed=int(variational.get("seed", 0)),
            output_dir=output_dir or data.get("output_dir"),
        )

    def to_dict(self) -> Dict[str, Any]:
        """Echo written into the report (output location excluded)."""
        return {
            "mode": self.mode,
            "dimension": self.dimension,
            "resolution": self.resolution,
            "A": self.a_spec.to_dict(),
            "B": self.b_spec.to_dict(),
            "solver": {
                "tol": self.solver.tol,
                "max_iter": self.solver.max_iter,
                "discretization": self.solver.mode,
                "dealias": self.solver.dealias,
            },
            "twoscale": (
                {"factor": str(self.twoscale_factor), "mode": self.twoscale_mode}
                if self.twoscale_factor is not None
                else None
            ),
            "bloch": {"fd_step": self.fd_step, "eigen_tol": self.eigen_tol, "etas": self.etas},
            "transform": {
                "resolution": self.transform_resolution,
                "cells": self.transform_cells,
                "eps": [f"1/{m}" for m in self.transform_eps],
                "max_frequency": self.max_frequency,
            },
            "converge": {
                "eps": [f"1/{m}" for m in self.converge_eps],
                "factor": str(self.converge_factor),
                "cell_resolution": self.cell_resolution,
                "source": self.source,
            },
            "variational": {"samples": self.samples, "seed": self.seed},
        }


def load_run_config(path: Path, **overrides: Any) -> RunConfig:
    """Read and validate a JSON run configuration.

    Raises:
        ConfigurationError: Missing file, invalid JSON or invalid content.
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ConfigurationError(f"Configuration file not found: {path}") from exc
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"Cannot read configuration {path}: {exc}") from exc
    return RunConfig.from_dict(data, **overrides)
