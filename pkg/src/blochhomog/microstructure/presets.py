"""
Periodic coefficient presets.

A ``PresetSpec`` is the keyed record a run configuration uses to describe A(y) or
B(y) on the unit torus. ``build_field`` samples it at cell centres, blending phase
matrices linearly across ``smoothing`` cells when requested.

Kinds:
- constant: one phase everywhere
- laminate: phase 1 on y_axis ∈ [0, fraction), phase 2 on [fraction, 1)
- checkerboard: phase 2 where exactly one coordinate is ≥ ½ (1D: laminate at ½)
- disk-inclusion: phase 2 inside a centred disk (1D: segment) of volume ``fraction``
- trig-smooth: (mean + Σ amplitude·Π_k f_k(2π·freq_k·y_k))·matrix
- tabulated: nearest-neighbour lookup in a CSV of grid values
"""

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from blochhomog.core.constants import MIN_RESOLUTION, SUPPORTED_DIMENSIONS
from blochhomog.core.models import CoefficientField
from blochhomog.exceptions import ValidationError
from blochhomog.logging_config import get_logger
from blochhomog.utils.grid import cell_centers

logger = get_logger(__name__)

CONSTANT = "constant"
LAMINATE = "laminate"
CHECKERBOARD = "checkerboard"
DISK_INCLUSION = "disk-inclusion"
TRIG_SMOOTH = "trig-smooth"
TABULATED = "tabulated"

PRESET_KINDS: List[str] = [CONSTANT, LAMINATE, CHECKERBOARD, DISK_INCLUSION, TRIG_SMOOTH, TABULATED]
PIECEWISE_KINDS: List[str] = [CONSTANT, LAMINATE, CHECKERBOARD, DISK_INCLUSION]

TRIG_FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "const": lambda x: np.ones_like(x),
}

PhaseValue = Union[float, Sequence[Sequence[float]]]

_REPRESENTABLE_TOL = 1e-9
_DISK_FRACTION_RTOL = 0.01


@dataclass(frozen=True)
class TrigTerm:
    """amplitude · Π_k f_k(2π·freq_k·y_k); missing axes contribute a factor 1."""

    amplitude: float
    factors: Tuple[Tuple[str, float], ...]

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TrigTerm":
        try:
            factors = tuple((str(func), float(freq)) for func, freq in data["factors"])
            term = cls(amplitude=float(data["amplitude"]), factors=factors)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"Malformed trig term: {data!r}", field="terms") from exc
        for func, _ in term.factors:
            if func not in TRIG_FUNCTIONS:
                raise ValidationError(f"Unknown trig function {func!r}", field="terms", value=func)
        return term

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        if len(self.factors) > points.shape[-1]:
            raise ValidationError(
                "Trig term has more factors than dimensions", field="terms", value=self.factors
            )
        result = np.full(points.shape[:-1], self.amplitude, dtype=float)
        for axis, (func, freq) in enumerate(self.factors):
            result = result * TRIG_FUNCTIONS[func](2.0 * np.pi * freq * points[..., axis])
        return result

    def to_dict(self) -> Dict[str, Any]:
        return {"amplitude": self.amplitude, "factors": [list(f) for f in self.factors]}


def phase_matrix(value: PhaseValue, dimension: int) -> np.ndarray:
    """Turn a scalar (times identity) or nested list into an N×N symmetric matrix."""
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        return float(arr) * np.eye(dimension)
    if arr.shape != (dimension, dimension):
        raise ValidationError(
            f"Phase matrix shape {arr.shape} does not match dimension {dimension}",
            field="phases",
            value=value,
        )
    if not np.allclose(arr, arr.T, rtol=0.0, atol=1e-14):
        raise ValidationError("Phase matrix must be symmetric", field="phases", value=value)
    return arr


def _ramp(distance: np.ndarray, width: float) -> np.ndarray:
    return np.clip(0.5 + distance / width, 0.0, 1.0)


def _laminate_weight(
    x: np.ndarray, fraction: float, smoothing: float, resolution: Optional[int]
) -> np.ndarray:
    """Weight of phase 2 for an interface pair at 0 and ``fraction``."""
    x = np.mod(x, 1.0)
    if smoothing <= 0.0 or resolution is None:
        return (x >= fraction).astype(float)
    distance = np.where(x >= fraction, np.minimum(x - fraction, 1.0 - x), -np.minimum(x, fraction - x))
    return _ramp(distance, smoothing / resolution)


@dataclass
class PresetSpec:
    """Keyed description of a periodic coefficient."""

    kind: str
    phases: Tuple[Any, ...] = (1.0,)
    fraction: float = 0.5
    axis: int = 1
    smoothing: float = 0.0
    mean: float = 1.0
    terms: Tuple[TrigTerm, ...] = ()
    matrix: Optional[Any] = None
    path: Optional[str] = None
    alpha: Optional[float] = None
    beta: Optional[float] = None
    _table: Optional[np.ndarray] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in PRESET_KINDS:
            raise ValidationError(f"Unknown preset kind {self.kind!r}", field="kind", value=self.kind)
        self.phases = tuple(self.phases)
        self.terms = tuple(self.terms)
        if self.smoothing < 0:
            raise ValidationError("Smoothing width must be >= 0", field="smoothing", value=self.smoothing)

        if self.kind == CONSTANT and len(self.phases) != 1:
            raise ValidationError("constant preset takes one phase", field="phases", value=self.phases)
        if self.kind in (LAMINATE, CHECKERBOARD, DISK_INCLUSION):
            if len(self.phases) != 2:
                raise ValidationError(f"{self.kind} preset takes two phases", field="phases", value=self.phases)
            if not 0.0 < self.fraction < 1.0:
                raise ValidationError("Volume fraction must lie in (0, 1)", field="fraction", value=self.fraction)
        if self.kind == LAMINATE and self.axis < 1:
            raise ValidationError("Layering axis is 1-based", field="axis", value=self.axis)
        if self.kind == TRIG_SMOOTH:
            floor = self.mean - sum(abs(t.amplitude) for t in self.terms)
            if floor <= 0.0:
                raise ValidationError(
                    "trig-smooth profile must stay positive (mean > Σ|amplitude|)",
                    field="terms",
                    value=floor,
                )
        if self.kind == TABULATED and not self.path:
            raise ValidationError("tabulated preset needs a CSV path", field="path")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PresetSpec":
        """Build from a run-configuration record."""
        if not isinstance(data, dict) or "kind" not in data:
            raise ValidationError("Preset record must be a mapping with a 'kind'", field="kind", value=data)
        known = {
            "kind", "phases", "fraction", "axis", "smoothing", "mean", "terms",
            "matrix", "path", "alpha", "beta",
        }
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"Unknown preset keys: {sorted(unknown)}", field="preset", value=sorted(unknown))
        params = dict(data)
        if "terms" in params:
            params["terms"] = tuple(TrigTerm.from_dict(t) for t in params["terms"])
        if "phases" in params:
            phases = params["phases"]
            params["phases"] = tuple(phases) if isinstance(phases, (list, tuple)) else (phases,)
        try:
            return cls(**params)
        except TypeError as exc:
            raise ValidationError(f"Malformed preset record: {exc}", field="preset") from exc

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"kind": self.kind}
        if self.kind in PIECEWISE_KINDS:
            data["phases"] = [np.asarray(p).tolist() for p in self.phases]
        if self.kind in (LAMINATE, CHECKERBOARD, DISK_INCLUSION):
            data["fraction"] = self.fraction
            data["smoothing"] = self.smoothing
        if self.kind == LAMINATE:
            data["axis"] = self.axis
        if self.kind == TRIG_SMOOTH:
            data["mean"] = self.mean
            data["terms"] = [t.to_dict() for t in self.terms]
            if self.matrix is not None:
                data["matrix"] = np.asarray(self.matrix).tolist()
        if self.kind == TABULATED:
            data["path"] = self.path
        if self.alpha is not None:
            data["alpha"] = self.alpha
        if self.beta is not None:
            data["beta"] = self.beta
        return data

    @property
    def is_piecewise(self) -> bool:
        return self.kind in PIECEWISE_KINDS

    def phase_matrices(self, dimension: int) -> List[np.ndarray]:
        return [phase_matrix(p, dimension) for p in self.phases]

    def table(self, dimension: int) -> np.ndarray:
        """Tabulated values, shape (n_t,)*N + (N, N)."""
        if self._table is None or self._table.shape[-1] != dimension:
            self._table = load_table(Path(str(self.path)), dimension)
        assert self._table is not None
        return self._table

    def derived_bounds(self, dimension: int) -> Tuple[float, float]:
        """Smallest and largest eigenvalue the preset can take."""
        if self.is_piecewise:
            eigs = np.concatenate([np.linalg.eigvalsh(m) for m in self.phase_matrices(dimension)])
            return float(eigs.min()), float(eigs.max())
        if self.kind == TRIG_SMOOTH:
            spread = sum(abs(t.amplitude) for t in self.terms)
            eigs = np.linalg.eigvalsh(self._trig_matrix(dimension))
            return float((self.mean - spread) * eigs.min()), float((self.mean + spread) * eigs.max())
        eigs = np.linalg.eigvalsh(self.table(dimension))
        return float(eigs.min()), float(eigs.max())

    def bounds(self, dimension: int) -> Tuple[float, float]:
        """Declared (α, β), falling back to the derived ones; checks consistency."""
        lo, hi = self.derived_bounds(dimension)
        if lo <= 0.0:
            raise ValidationError("Preset is not positive definite", field="phases", value=lo)
        alpha = self.alpha if self.alpha is not None else lo
        beta = self.beta if self.beta is not None else hi
        if not 0.0 < alpha <= beta:
            raise ValidationError("Need 0 < alpha <= beta", field="alpha", value=(alpha, beta))
        tol = 1e-12 * max(1.0, hi)
        if lo < alpha - tol or hi > beta + tol:
            raise ValidationError(
                f"Preset eigenvalues [{lo:g}, {hi:g}] violate declared bounds [{alpha:g}, {beta:g}]",
                field="alpha",
                value=(alpha, beta),
            )
        return float(alpha), float(beta)

    def _trig_matrix(self, dimension: int) -> np.ndarray:
        if self.matrix is None:
            return np.eye(dimension)
        return phase_matrix(self.matrix, dimension)

    def phase_weight(self, points: np.ndarray, resolution: Optional[int] = None) -> np.ndarray:
        """Weight of phase 2 at ``points``; blended across ``smoothing`` cells if a
        resolution is given, sharp otherwise."""
        dimension = points.shape[-1]
        smoothing = self.smoothing if resolution is not None else 0.0
        if self.kind == LAMINATE:
            if self.axis > dimension:
                raise ValidationError("Layering axis exceeds dimension", field="axis", value=self.axis)
            return _laminate_weight(points[..., self.axis - 1], self.fraction, smoothing, resolution)
        if self.kind == CHECKERBOARD:
            weights = [_laminate_weight(points[..., k], 0.5, smoothing, resolution) for k in range(dimension)]
            if dimension == 1:
                return weights[0]
            w1, w2 = weights
            return w1 + w2 - 2.0 * w1 * w2
        if self.kind == DISK_INCLUSION:
            if dimension == 1:
                radius = 0.5 * self.fraction
            else:
                if self.fraction >= math.pi / 4.0:
                    raise ValidationError(
                        "Disk does not fit in the cell (fraction >= π/4)", field="fraction", value=self.fraction
                    )
                radius = math.sqrt(self.fraction / math.pi)
            offset = np.mod(points, 1.0) - 0.5
            rho = np.sqrt(np.sum(offset**2, axis=-1))
            if smoothing <= 0.0:
                return (rho <= radius).astype(float)
            return _ramp(radius - rho, smoothing / float(resolution))
        return np.zeros(points.shape[:-1])

    def evaluate(self, points: np.ndarray, resolution: Optional[int] = None) -> np.ndarray:
        """Coefficient at arbitrary torus points (…, N) -> (…, N, N).

        Without ``resolution`` piecewise presets are evaluated sharp (no blending).
        """
        points = np.asarray(points, dtype=float)
        dimension = points.shape[-1]
        if dimension not in SUPPORTED_DIMENSIONS:
            raise ValidationError(f"Unsupported dimension {dimension}", field="dimension", value=dimension)

        if self.kind == CONSTANT:
            base = self.phase_matrices(dimension)[0]
            return np.broadcast_to(base, points.shape[:-1] + base.shape).copy()
        if self.kind in (LAMINATE, CHECKERBOARD, DISK_INCLUSION):
            first, second = self.phase_matrices(dimension)
            theta = self.phase_weight(points, resolution)[..., None, None]
            return (1.0 - theta) * first + theta * second
        if self.kind == TRIG_SMOOTH:
            scalar = np.full(points.shape[:-1], self.mean, dtype=float)
            for term in self.terms:
                scalar = scalar + term.evaluate(points)
            return scalar[..., None, None] * self._trig_matrix(dimension)
        table = self.table(dimension)
        n_t = table.shape[0]
        idx = np.floor(np.mod(points, 1.0) * n_t).astype(int) % n_t
        return table[tuple(idx[..., k] for k in range(dimension))]

    def check_representable(self, resolution: int, dimension: int = 1) -> Optional[float]:
        """Raise unless laminate and 1D inclusion interfaces fall on cell faces.

        A 2D disk is staircased by the grid; its sampled phase-2 fraction is
        returned and a warning logged when it misses ``fraction`` by more than
        1% relative.
        """
        if self.kind == LAMINATE:
            self._check_cells(self.fraction * resolution, resolution)
        elif self.kind == DISK_INCLUSION and dimension == 1:
            self._check_cells(0.5 * self.fraction * resolution, resolution)
        elif self.kind == DISK_INCLUSION:
            sampled = float(np.mean(self.phase_weight(cell_centers(resolution, dimension), resolution)))
            if abs(sampled - self.fraction) > _DISK_FRACTION_RTOL * self.fraction:
                logger.warning(
                    "Disk inclusion sampled with fraction %.4f instead of %.4f on %d cells per axis",
                    sampled,
                    self.fraction,
                    resolution,
                )
            return sampled
        return None

    def _check_cells(self, cells: float, resolution: int) -> None:
        if abs(cells - round(cells)) > _REPRESENTABLE_TOL:
            raise ValidationError(
                f"Fraction {self.fraction} not representable on {resolution} cells",
                field="fraction",
                value=self.fraction,
            )


def load_table(path: Path, dimension: int) -> np.ndarray:
    """Read a tabulated coefficient: n^N rows (row-major), N² entries per row."""
    if not path.exists():
        raise ValidationError(f"Tabulated coefficient file not found: {path}", field="path", value=str(path))
    frame = pd.read_csv(path, header=None)
    data = frame.to_numpy(dtype=float)
    if data.shape[1] != dimension * dimension:
        raise ValidationError(
            f"Expected {dimension * dimension} columns, found {data.shape[1]}", field="path", value=str(path)
        )
    n_t = int(round(data.shape[0] ** (1.0 / dimension)))
    if n_t**dimension != data.shape[0]:
        raise ValidationError("Row count is not a perfect power of the dimension", field="path", value=str(path))
    table = data.reshape((n_t,) * dimension + (dimension, dimension))
    logger.debug("Loaded %s table from %s", table.shape, path)
    return table


def build_field(spec: PresetSpec, dimension: int, resolution: int) -> CoefficientField:
    """Sample a preset at the cell centres y_j = (j+½)/n.

    Args:
        spec: Preset description.
        dimension: N (1 or 2).
        resolution: n, even and at least 4.

    Returns:
        Immutable coefficient field with the preset's (α, β).

    Raises:
        ValidationError: Odd/small n, unsupported N, non-representable fraction,
            non-SPD phase or declared bounds violated.
    """
    if dimension not in SUPPORTED_DIMENSIONS:
        raise ValidationError(f"Unsupported dimension {dimension}", field="dimension", value=dimension)
    if resolution < MIN_RESOLUTION or resolution % 2:
        raise ValidationError(
            f"Resolution must be even and >= {MIN_RESOLUTION}", field="resolution", value=resolution
        )
    spec.check_representable(resolution, dimension)
    alpha, beta = spec.bounds(dimension)

    points = cell_centers(resolution, dimension)
    values = spec.evaluate(points, resolution=resolution)
    values = 0.5 * (values + np.swapaxes(values, -1, -2))
    logger.debug("Built %s field: N=%d n=%d", spec.kind, dimension, resolution)
    return CoefficientField(values=values, alpha=alpha, beta=beta, label=spec.kind)
