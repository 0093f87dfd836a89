"""
ε-indexed 1D problems on (0, 1).

a^ε(x) = a(x/ε) and b^ε(x) = b(t·x/ε) for ε = 1/M and a rational factor t. The
mesh has ``cell_resolution`` elements per ε-cell; piecewise-constant profiles must
jump on element faces, which makes every element see constant coefficients.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Union

import numpy as np

from blochhomog.exceptions import ValidationError
from blochhomog.microstructure.presets import (
    CHECKERBOARD,
    CONSTANT,
    DISK_INCLUSION,
    LAMINATE,
    TABULATED,
    PresetSpec,
)
from blochhomog.utils.rational import FactorLike, as_fraction

MIN_CELL_RESOLUTION = 32
GAUSS_POINTS = 4

Source = Union[float, Callable[[np.ndarray], np.ndarray]]


def breakpoints(spec: PresetSpec) -> Optional[List[Fraction]]:
    """Jump locations of a 1D profile in [0, 1), or None for non-piecewise profiles."""
    if spec.kind == CONSTANT:
        return []
    if spec.kind == LAMINATE:
        if spec.axis != 1:
            raise ValidationError("1D laminates are layered along axis 1", field="axis", value=spec.axis)
        return [Fraction(0), as_fraction(spec.fraction)]
    if spec.kind == CHECKERBOARD:
        return [Fraction(0), Fraction(1, 2)]
    if spec.kind == DISK_INCLUSION:
        half = as_fraction(spec.fraction) / 2
        return [Fraction(1, 2) - half, Fraction(1, 2) + half]
    if spec.kind == TABULATED:
        count = spec.table(1).shape[0]
        return [Fraction(j, count) for j in range(count)]
    return None


def scalar_profile(spec: PresetSpec, y: np.ndarray) -> np.ndarray:
    """Sharp 1D profile values at periodic coordinates ``y``."""
    y = np.asarray(y, dtype=float)
    return spec.evaluate(np.mod(y, 1.0)[..., None])[..., 0, 0]


def _check_faces(spec: PresetSpec, scale: Fraction, elements: int, copies: int, what: str) -> None:
    """Jumps of spec(scale·x) for x ∈ (0, 1) must land on multiples of 1/elements."""
    breaks = breakpoints(spec)
    if breaks is None:
        return
    for copy in range(copies):
        for beta in breaks:
            position = (copy + beta) / scale * elements
            if position.denominator != 1:
                raise ValidationError(
                    f"{what} jumps between grid faces (1/ε·t = {scale}, {elements} elements)",
                    field="cell_resolution",
                    value=elements,
                )


@dataclass
class EpsilonProblem:
    """One ε of the 1D state/adjoint pair on (0, 1) with homogeneous Dirichlet data."""

    a_spec: PresetSpec
    b_spec: PresetSpec
    cells: int
    factor: FactorLike = Fraction(1)
    cell_resolution: int = MIN_CELL_RESOLUTION
    source: Source = 1.0
    _a: Optional[np.ndarray] = field(default=None, init=False, repr=False)
    _b: Optional[np.ndarray] = field(default=None, init=False, repr=False)

    def __post_init__(self):
        self.factor = as_fraction(self.factor)
        if self.cells < 1:
            raise ValidationError("Cell count must be >= 1", field="cells", value=self.cells)
        if self.cell_resolution < MIN_CELL_RESOLUTION:
            raise ValidationError(
                f"Need at least {MIN_CELL_RESOLUTION} elements per ε-cell",
                field="cell_resolution",
                value=self.cell_resolution,
            )
        elements = self.elements
        _check_faces(self.a_spec, Fraction(self.cells), elements, self.cells, "a^ε")
        b_scale = self.factor * self.cells
        b_copies = -(-b_scale.numerator // b_scale.denominator)
        _check_faces(self.b_spec, b_scale, elements, b_copies, "b^ε")

    @property
    def eps(self) -> float:
        return 1.0 / self.cells

    @property
    def elements(self) -> int:
        return self.cells * self.cell_resolution

    @property
    def h(self) -> float:
        return 1.0 / self.elements

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.elements + 1)

    def _gauss(self):
        points, weights = np.polynomial.legendre.leggauss(GAUSS_POINTS)
        left = np.arange(self.elements)[:, None] * self.h
        return left + 0.5 * self.h * (points + 1.0), 0.5 * weights

    def a_segments(self) -> np.ndarray:
        """Element values of a^ε (harmonic Gauss average)."""
        if self._a is None:
            x, w = self._gauss()
            self._a = 1.0 / ((1.0 / scalar_profile(self.a_spec, self.cells * x)) @ w)
        return self._a

    def b_segments(self) -> np.ndarray:
        """Element values of b^ε (arithmetic Gauss average)."""
        if self._b is None:
            x, w = self._gauss()
            self._b = scalar_profile(self.b_spec, float(self.factor * self.cells) * x) @ w
        return self._b

    def source_at(self, x: np.ndarray) -> np.ndarray:
        if callable(self.source):
            return np.asarray(self.source(x), dtype=float)
        return np.full_like(x, float(self.source))

    def load_vector(self) -> np.ndarray:
        """∫ f φ_i for every node by Gauss quadrature on each element."""
        x, w = self._gauss()
        f = self.source_at(x)
        local = (x - np.arange(self.elements)[:, None] * self.h) / self.h
        load = np.zeros(self.elements + 1)
        np.add.at(load, np.arange(self.elements), self.h * ((f * (1.0 - local)) @ w))
        np.add.at(load, np.arange(1, self.elements + 1), self.h * ((f * local) @ w))
        return load
