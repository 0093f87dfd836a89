"""
Data Models for blochhomog

Dataclass definitions for coefficient fields, cell solutions, tensors, Bloch modes and
experiment tables.
"""

from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from blochhomog.core.constants import (
    DISCRETIZATIONS,
    FD_HARMONIC,
    FOURIER_GALERKIN,
    MIN_RESOLUTION,
    SUPPORTED_DIMENSIONS,
    SYMMETRY_TOL,
)
from blochhomog.exceptions import ValidationError


@dataclass(eq=False)
class CoefficientField:
    """Symmetric matrix coefficient sampled at the cell centres of the unit torus.

    ``values`` has shape ``(n,)*N + (N, N)``. The array is copied and frozen on
    construction.
    """

    values: np.ndarray
    alpha: float
    beta: float
    label: str = ""

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim < 3 or values.shape[-1] != values.shape[-2]:
            raise ValidationError("Coefficient values must end in an (N, N) block", field="values")
        dim = values.shape[-1]
        if dim not in SUPPORTED_DIMENSIONS or values.ndim != dim + 2:
            raise ValidationError(f"Unsupported dimension {dim}", field="dimension", value=dim)
        n = values.shape[0]
        if any(s != n for s in values.shape[:dim]):
            raise ValidationError("Grid must have equal resolution per axis", field="values")
        if n < MIN_RESOLUTION or n % 2:
            raise ValidationError(
                f"Resolution must be even and >= {MIN_RESOLUTION}", field="resolution", value=n
            )
        asym = np.max(np.abs(values - np.swapaxes(values, -1, -2)))
        if asym > SYMMETRY_TOL:
            raise ValidationError(f"Coefficient not symmetric (max {asym:.3e})", field="values")
        values.flags.writeable = False
        self.values = values

    @property
    def dimension(self) -> int:
        return int(self.values.shape[-1])

    @property
    def resolution(self) -> int:
        return int(self.values.shape[0])

    @property
    def grid_shape(self) -> Tuple[int, ...]:
        return self.values.shape[: self.dimension]

    def same_grid(self, other: "CoefficientField") -> bool:
        return self.values.shape == other.values.shape

    def scaled(self, factor: float) -> "CoefficientField":
        """Return the field multiplied by a positive scalar."""
        return CoefficientField(
            values=factor * self.values,
            alpha=factor * self.alpha,
            beta=factor * self.beta,
            label=f"{factor:g}*{self.label}",
        )


@dataclass
class ValidationReport:
    """Worst-case eigenvalues of a field against declared ellipticity bounds."""

    alpha: float
    beta: float
    min_eigenvalue: float
    max_eigenvalue: float
    coercive: bool
    bounded: bool
    failing_points: int
    worst_point: Tuple[int, ...] = ()

    @property
    def passed(self) -> bool:
        return self.coercive and self.bounded

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["passed"] = self.passed
        return data


@dataclass
class SolverConfig:
    """Cell solver settings."""

    tol: float = 1e-10
    max_iter: int = 500
    mode: str = FOURIER_GALERKIN
    dealias: bool = False

    def __post_init__(self):
        if not 0.0 < self.tol < 1.0:
            raise ValidationError("Tolerance must lie in (0, 1)", field="tol", value=self.tol)
        if self.max_iter < 1:
            raise ValidationError(
                "max_iter must be at least 1", field="max_iter", value=self.max_iter
            )
        if self.mode not in DISCRETIZATIONS:
            raise ValidationError(f"Unknown discretization {self.mode!r}", field="mode", value=self.mode)
        if self.mode == FD_HARMONIC and self.dealias:
            raise ValidationError("Dealiasing applies to the Fourier path only", field="dealias")

    @classmethod
    def from_defaults(cls, **overrides: Any) -> "SolverConfig":
        """Build from environment defaults, then apply overrides."""
        from blochhomog.config import get_config

        defaults = get_config().solver
        params: Dict[str, Any] = {
            "tol": defaults.tol,
            "max_iter": defaults.max_iter,
            "dealias": defaults.dealias,
        }
        params.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**params)


@dataclass
class CellSolution:
    """One solved periodic cell problem.

    ``gradient`` lives on the quadrature nodes of the discretization that produced it
    (the cell grid, the 3/2 grid when dealiased, or half-cells for fd-harmonic).
    """

    values: np.ndarray
    gradient: np.ndarray
    residual: float
    iterations: int
    direction: int = 0
    history: List[float] = field(default_factory=list)

    @property
    def mean(self) -> float:
        return float(np.mean(self.values))


@dataclass
class CorrectorSet:
    """Correctors of one kind (chi, zeta or psi) for every direction k = 1..N."""

    kind: str
    mode: str
    dealias: bool
    tol: float
    solutions: List[CellSolution]

    def __post_init__(self):
        if not self.solutions:
            raise ValidationError("CorrectorSet needs at least one direction", field="solutions")

    @property
    def dimension(self) -> int:
        return int(self.solutions[0].gradient.shape[-1])

    @property
    def resolution(self) -> int:
        return int(self.solutions[0].values.shape[0])

    @property
    def values(self) -> np.ndarray:
        return np.stack([s.values for s in self.solutions])

    @property
    def gradients(self) -> np.ndarray:
        """Gradients on quadrature nodes, shape (N, *nodes, N)."""
        return np.stack([s.gradient for s in self.solutions])

    @property
    def residuals(self) -> List[float]:
        return [s.residual for s in self.solutions]

    def total_gradients(self) -> np.ndarray:
        """∇w_k + e_k for every direction, shape (N, *nodes, N)."""
        grads = self.gradients.copy()
        for k in range(self.dimension):
            grads[k, ..., k] += 1.0
        return grads

    def combine(self, lam: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Σ λ_k w_k and its gradient."""
        lam = np.asarray(lam, dtype=float)
        values = np.tensordot(lam, self.values, axes=1)
        gradient = np.tensordot(lam, self.gradients, axes=1)
        return values, gradient


@dataclass
class HomogTensor:
    """N×N tensor with provenance and discretization metadata."""

    matrix: np.ndarray
    provenance: str
    resolution: int
    tol: float
    asymmetry: float = 0.0
    extras: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_raw(
        cls,
        raw: np.ndarray,
        provenance: str,
        resolution: int,
        tol: float,
        extras: Optional[Dict[str, Any]] = None,
    ) -> "HomogTensor":
        """Symmetrize an assembled matrix, recording its asymmetry first."""
        raw = np.atleast_2d(np.asarray(raw, dtype=float))
        asymmetry = float(np.max(np.abs(raw - raw.T)))
        return cls(
            matrix=0.5 * (raw + raw.T),
            provenance=provenance,
            resolution=resolution,
            tol=tol,
            asymmetry=asymmetry,
            extras=extras or {},
        )

    @property
    def dimension(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix)[0])

    def to_dict(self) -> Dict[str, Any]:
        extras = {
            key: (np.asarray(value).tolist() if isinstance(value, np.ndarray) else value)
            for key, value in sorted(self.extras.items())
        }
        return {
            "provenance": self.provenance,
            "N": self.dimension,
            "n": self.resolution,
            "tol": self.tol,
            "asymmetry": self.asymmetry,
            "matrix": self.matrix.tolist(),
            "extras": extras,
        }


@dataclass
class BoundLink:
    """One PSD comparison lower ≤ upper."""

    name: str
    min_eigenvalue: float
    passed: bool
    supplementary: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class BoundsReport:
    """Harmonic/arithmetic means and the links of the bound chain."""

    lower_harmonic: np.ndarray
    upper_mean: np.ndarray
    links: List[BoundLink]

    @property
    def passed(self) -> bool:
        return all(link.passed for link in self.links)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lower_harmonic": np.asarray(self.lower_harmonic).tolist(),
            "upper_mean": np.asarray(self.upper_mean).tolist(),
            "links": [link.to_dict() for link in self.links],
            "passed": self.passed,
        }


@dataclass
class BlochMode:
    """Lowest eigenpair of the shifted operator at η."""

    eta: np.ndarray
    eigenvalue: float
    vector: np.ndarray
    residual: float
    iterations: int
    gap_estimate: Optional[float] = None
    near_degenerate: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            "eta": np.asarray(self.eta).tolist(),
            "eigenvalue": self.eigenvalue,
            "residual": self.residual,
            "iterations": self.iterations,
            "gap_estimate": self.gap_estimate,
            "near_degenerate": self.near_degenerate,
        }


@dataclass
class BlochDecomposition:
    """Bloch coefficients of a grid function over all bands and dual points.

    ``coefficients[i, m]`` is the coefficient of band m+1 at dual point
    ``2π * dual_indices[i]``; ``bases[i]`` holds the cell eigenvectors (columns) used.
    """

    cells: int
    resolution: int
    dimension: int
    dual_indices: np.ndarray
    coefficients: np.ndarray
    eigenvalues: np.ndarray
    bases: Optional[np.ndarray]
    energy: float

    @property
    def eps(self) -> float:
        return 1.0 / self.cells

    @property
    def band_count(self) -> int:
        return int(self.coefficients.shape[1])

    @property
    def scaled_eigenvalues(self) -> np.ndarray:
        """λ_m^ε(ξ) = ε⁻² λ_m(εξ)."""
        return self.eigenvalues * self.cells**2

    @property
    def coefficient_energy(self) -> float:
        return float(np.sum(np.abs(self.coefficients) ** 2))

    @property
    def parseval_residual(self) -> float:
        """Relative mismatch of Σ|B_m g(ξ)|² against ‖g‖²."""
        if self.energy == 0.0:
            return self.coefficient_energy
        return abs(self.coefficient_energy - self.energy) / self.energy


@dataclass
class ConvergenceTable:
    """Error rows over ε with fitted log-log slopes per column."""

    columns: List[str]
    rows: List[Dict[str, float]]
    slopes: Dict[str, float] = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        return np.array([row[name] for row in self.rows], dtype=float)

    def to_dict(self) -> Dict[str, Any]:
        return {"columns": list(self.columns), "rows": self.rows, "slopes": self.slopes}


__all__ = [
    "CoefficientField",
    "ValidationReport",
    "SolverConfig",
    "CellSolution",
    "CorrectorSet",
    "HomogTensor",
    "BoundLink",
    "BoundsReport",
    "BlochMode",
    "BlochDecomposition",
    "ConvergenceTable",
    "FOURIER_GALERKIN",
    "FD_HARMONIC",
]
