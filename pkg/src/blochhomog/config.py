"""
Centralized Configuration Module

Provides configuration classes and environment variable loading for all components.
Run-specific settings (presets, modes, ε lists) come from the JSON run configuration
handled in ``blochhomog.cli.run_config``; the values here are the defaults it falls
back to.

Usage:
    from blochhomog.config import get_config

    config = get_config()
    tol = config.solver.tol
    threads = config.parallel.threads
"""

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

# Load .env file if present
load_dotenv()


def _get_project_root() -> Path:
    """Get the project root directory."""
    # Go up: config.py -> blochhomog -> src -> project_root
    current = Path(__file__).resolve()
    return current.parent.parent.parent


def _env_flag(name: str, default: str) -> bool:
    return os.getenv(name, default).lower() in ("true", "1", "yes")


@dataclass
class SolverDefaults:
    """Cell solver defaults."""

    tol: float = field(default_factory=lambda: float(os.getenv("BLOCH_HOMOG_TOL", "1e-10")))
    max_iter: int = field(default_factory=lambda: int(os.getenv("BLOCH_HOMOG_MAX_ITER", "500")))
    dealias: bool = field(default_factory=lambda: _env_flag("BLOCH_HOMOG_DEALIAS", "false"))

    def __post_init__(self):
        if not 0.0 < self.tol < 1.0:
            self.tol = 1e-10
        if self.max_iter < 1:
            self.max_iter = 500


@dataclass
class BlochDefaults:
    """Bloch eigen-solve and finite-difference defaults."""

    fd_step: float = field(
        default_factory=lambda: float(os.getenv("BLOCH_HOMOG_FD_STEP", "1e-3"))
    )
    eigen_tol: float = field(
        default_factory=lambda: float(os.getenv("BLOCH_HOMOG_EIGEN_TOL", "1e-12"))
    )


@dataclass
class ParallelConfig:
    """Thread cap for independent solves."""

    threads: int = field(default_factory=lambda: int(os.getenv("BLOCH_HOMOG_THREADS", "1")))

    def __post_init__(self):
        if self.threads < 1:
            self.threads = 1


@dataclass
class OutputConfig:
    """Report output configuration."""

    output_dir: str = field(default_factory=lambda: os.getenv(
        "BLOCH_HOMOG_OUTPUT_DIR",
        str(_get_project_root() / "runs")
    ))

    def __post_init__(self):
        # Resolve relative paths
        if not os.path.isabs(self.output_dir):
            self.output_dir = str(_get_project_root() / self.output_dir)


@dataclass
class LoggingConfig:
    """Logging configuration."""

    level: str = field(default_factory=lambda: os.getenv(
        "BLOCH_HOMOG_LOG_LEVEL", "INFO"
    ).upper())
    log_file: Optional[str] = field(default_factory=lambda: os.getenv(
        "BLOCH_HOMOG_LOG_FILE"
    ))

    def __post_init__(self):
        # Validate log level
        valid_levels = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}
        if self.level not in valid_levels:
            self.level = "INFO"


@dataclass
class Config:
    """Main configuration container."""

    solver: SolverDefaults = field(default_factory=SolverDefaults)
    bloch: BlochDefaults = field(default_factory=BlochDefaults)
    parallel: ParallelConfig = field(default_factory=ParallelConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    logging: LoggingConfig = field(default_factory=LoggingConfig)


# Singleton instance
_config: Optional[Config] = None


def get_config() -> Config:
    """Get the global configuration instance.

    Returns:
        Config: The application configuration.
    """
    global _config
    if _config is None:
        _config = Config()
    return _config


def reset_config() -> None:
    """Reset the configuration (useful for testing)."""
    global _config
    _config = None
