"""
Pytest Configuration and Fixtures

Provides shared presets, fields, solver settings and an isolated configuration.
"""

import json
from pathlib import Path
from typing import Any, Callable, Dict, Generator

import pytest

# Add src to path for imports
import sys
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from blochhomog.core.constants import FD_HARMONIC, FOURIER_GALERKIN  # noqa: E402
from blochhomog.core.models import SolverConfig  # noqa: E402
from blochhomog.microstructure.presets import PresetSpec, TrigTerm  # noqa: E402

LAMINATE_A: Dict[str, Any] = {"kind": "laminate", "phases": [1.0, 4.0], "fraction": 0.5}
LAMINATE_B: Dict[str, Any] = {"kind": "laminate", "phases": [2.0, 1.0], "fraction": 0.5}


@pytest.fixture(scope="session")
def project_root() -> Path:
    """Get the project root directory."""
    return Path(__file__).parent.parent


@pytest.fixture(autouse=True)
def test_config(tmp_path: Path, monkeypatch) -> Generator[Any, None, None]:
    """Isolated configuration: serial execution, default tolerances, temp output dir."""
    monkeypatch.setenv("BLOCH_HOMOG_THREADS", "1")
    monkeypatch.setenv("BLOCH_HOMOG_OUTPUT_DIR", str(tmp_path / "runs"))
    monkeypatch.setenv("BLOCH_HOMOG_LOG_LEVEL", "DEBUG")
    for name in (
        "BLOCH_HOMOG_TOL",
        "BLOCH_HOMOG_MAX_ITER",
        "BLOCH_HOMOG_DEALIAS",
        "BLOCH_HOMOG_FD_STEP",
        "BLOCH_HOMOG_EIGEN_TOL",
        "BLOCH_HOMOG_LOG_FILE",
    ):
        monkeypatch.delenv(name, raising=False)

    from blochhomog.config import get_config, reset_config
    reset_config()

    yield get_config()

    reset_config()


@pytest.fixture
def laminate_a() -> PresetSpec:
    """1D two-phase a = {1, 4}, fraction ½."""
    return PresetSpec.from_dict(LAMINATE_A)


@pytest.fixture
def laminate_b() -> PresetSpec:
    """1D two-phase b = {2, 1}, fraction ½."""
    return PresetSpec.from_dict(LAMINATE_B)


@pytest.fixture
def identity() -> PresetSpec:
    return PresetSpec(kind="constant", phases=(1.0,))


@pytest.fixture
def smooth_a() -> PresetSpec:
    """a(y) = 2 + sin(2πy₁)·sin(2πy₂)."""
    return PresetSpec(
        kind="trig-smooth",
        mean=2.0,
        terms=(TrigTerm(amplitude=1.0, factors=(("sin", 1.0), ("sin", 1.0))),),
    )


@pytest.fixture
def smooth_b() -> PresetSpec:
    """b(y) = 3 + cos(2πy₂)."""
    return PresetSpec(
        kind="trig-smooth",
        mean=3.0,
        terms=(TrigTerm(amplitude=1.0, factors=(("const", 0.0), ("cos", 1.0))),),
    )


@pytest.fixture
def smooth_1d() -> PresetSpec:
    """a(y) = 2 + cos(2πy)."""
    return PresetSpec(
        kind="trig-smooth",
        mean=2.0,
        terms=(TrigTerm(amplitude=1.0, factors=(("cos", 1.0),)),),
    )


@pytest.fixture
def fourier_cfg() -> SolverConfig:
    return SolverConfig(tol=1e-11, max_iter=500, mode=FOURIER_GALERKIN)


@pytest.fixture
def fd_cfg() -> SolverConfig:
    return SolverConfig(tol=1e-10, max_iter=500, mode=FD_HARMONIC)


@pytest.fixture
def write_run_config(tmp_path: Path) -> Callable[..., Path]:
    """Write a JSON run configuration into the temp dir and return its path."""

    def _write(payload: Dict[str, Any], name: str = "run.json") -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(payload), encoding="utf-8")
        return path

    return _write
