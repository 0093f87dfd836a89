"""
blochhomog: periodic homogenization workbench

Computes the homogenized tensors A*, B* and the interaction tensor B# of periodic
media from cell problems, and cross-checks them through Bloch-wave spectral
representations, bound chains, a min-max characterization and a 1D ε-convergence
experiment.

Main components:
- microstructure: periodic coefficient presets, validation and resampling
- solver: FFT-preconditioned cell solvers and the shifted Bloch operator
- tensors: A*, B*, B# assemblies, bounds and Lagrangian checks
- bloch: Bloch eigenpairs, Hessians at zero and the discrete Bloch transform
- homogenize1d: 1D state/adjoint problems and flux convergence tables
- cli: run configuration, pipelines and report emission

Usage:
    from blochhomog.microstructure import PresetSpec, build_field
    from blochhomog.solver import SolverConfig, solve_correctors
    from blochhomog.tensors import assemble_homogenized
"""

__version__ = "1.0.0"

from blochhomog.config import get_config
from blochhomog.logging_config import setup_logging

__all__ = [
    "__version__",
    "get_config",
    "setup_logging",
]
