"""
Shared Constants for blochhomog

Tolerances, provenance tags, modes and exit codes used across the application.
"""

from typing import Dict, List

# Report schema
SCHEMA_VERSION: str = "1.0"

# Supported dimensions and grids
SUPPORTED_DIMENSIONS: List[int] = [1, 2]
MIN_RESOLUTION: int = 4
MAX_DENSE_CELL_POINTS: int = 32 * 32
MAX_REFINED_POINTS_PER_AXIS: int = 1 << 15

# Rational factors
MAX_FACTOR_DENOMINATOR: int = 64
FACTOR_MATCH_TOL: float = 1e-12

# Discretizations
FOURIER_GALERKIN: str = "fourier-galerkin"
FD_HARMONIC: str = "fd-harmonic"
DISCRETIZATIONS: List[str] = [FOURIER_GALERKIN, FD_HARMONIC]

# Tensor provenance tags
ASTAR: str = "Astar"
BSTAR: str = "Bstar"
BSHARP_ENERGY: str = "Bsharp-energy"
BSHARP_FLUX: str = "Bsharp-flux"
BSHARP_PERTURBATION: str = "Bsharp-perturbation"
BSHARP_TWOSCALE_T: str = "Bsharp-twoscale-t"
BSHARP_TWOSCALE_S: str = "Bsharp-twoscale-s"
HESSIAN_LAMBDA: str = "hessian-lambda1"
HESSIAN_MU: str = "hessian-mu1"
HESSIAN_NU: str = "hessian-nu1"
HESSIAN_NU_TWOSCALE: str = "hessian-nu1-twoscale"

# Corrector kinds
CHI: str = "chi"
ZETA: str = "zeta"
PSI: str = "psi"

# Invariant tolerances
SYMMETRY_TOL: float = 1e-14
TENSOR_SYMMETRY_TOL: float = 1e-10
MEAN_TOL: float = 1e-12
PSD_TOL: float = 1e-8
IMAG_TOL: float = 1e-10
EQUIVALENCE_TOL: float = 1e-8
BOUNDARY_TOL: float = 1e-12

# Bloch eigen-solve
SHIFT_FACTOR: float = 1e-3
COLLISION_GAP: float = 1e-8
MAX_OUTER_ITERATIONS: int = 60

# Run modes
MODE_TENSORS: str = "tensors"
MODE_BLOCH: str = "bloch-verify"
MODE_BOUNDS: str = "bounds"
MODE_TRANSFORM: str = "transform-check"
MODE_CONVERGE: str = "converge-1d"
MODE_VARIATIONAL: str = "variational"
MODE_ALL: str = "all"
MODES: List[str] = [
    MODE_TENSORS,
    MODE_BLOCH,
    MODE_BOUNDS,
    MODE_TRANSFORM,
    MODE_CONVERGE,
    MODE_VARIATIONAL,
    MODE_ALL,
]
# Execution order used by "all": correctors -> tensors -> Bloch -> experiments
MODE_ORDER: List[str] = [
    MODE_TENSORS,
    MODE_BOUNDS,
    MODE_VARIATIONAL,
    MODE_BLOCH,
    MODE_TRANSFORM,
    MODE_CONVERGE,
]

# Exit codes
EXIT_OK: int = 0
EXIT_CHECK_FAILED: int = 2
EXIT_CONFIG_ERROR: int = 3
EXIT_SOLVER_ERROR: int = 4
EXIT_REPORT_ERROR: int = 5

# Report artifacts
REPORT_FILES: Dict[str, str] = {
    "report": "report.json",
    "tensors": "tensors.csv",
    "dispersion": "dispersion.csv",
    "convergence": "convergence.csv",
    "residuals": "residuals.csv",
    "timings": "timings.json",
}
