"""
Discrete Floquet-Bloch transform on a torus of M cells per axis.

The global grid has L = M·n points per axis at x_j = (j+½)/L, ε = 1/M. For a dual
index k (ξ = 2πk, η = εξ) and a band m the Bloch wave is

    ψ_{m,k}(x) = e^{i x·ξ} φ_m(x/ε; η)

with φ_m the m-th eigenvector of the cell operator A(η), normalized to mean|φ|² = 1.
These L^N waves are orthonormal for the mean inner product of the global grid, so

    B_m g(ξ) = (1/L^N) Σ_x g(x) e^{−i x·ξ} conj(φ_m(x/ε; η))

satisfies Σ |B_m g(ξ)|² = mean |g|² and g = Σ B_m g(ξ) ψ_{m,k}.

Cell eigenbases come from a dense Hermitian eigensolve of A(η) in the Fourier
basis of the cell grid, which is only meant for small cells (n^N ≤ 1024).
"""

from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from blochhomog.bloch.modes import fix_phase, normalize
from blochhomog.core.constants import MAX_DENSE_CELL_POINTS
from blochhomog.core.models import BlochDecomposition, CoefficientField, ConvergenceTable
from blochhomog.exceptions import BandIndexError, DualGridError, GridMismatchError, ValidationError
from blochhomog.logging_config import get_logger
from blochhomog.solver.spectral import SpectralGrid, angular_wavenumbers
from blochhomog.utils.grid import cell_centers, loglog_slope, tile_periods
from blochhomog.utils.parallel import parallel_map

logger = get_logger(__name__)

GridFunction = Callable[[np.ndarray], np.ndarray]

DUAL_GRID_TOL = 1e-9
# Eigenvalues below this fraction of the largest are treated as the kernel
KERNEL_FRACTION = 1e-10


def _cell_points(field: CoefficientField) -> int:
    points = field.resolution**field.dimension
    if points > MAX_DENSE_CELL_POINTS:
        raise ValidationError(
            f"Dense Bloch basis limited to {MAX_DENSE_CELL_POINTS} cell points, got {points}",
            field="resolution",
            value=field.resolution,
        )
    return points


def fourier_matrix(field: CoefficientField, eta: Sequence[float]) -> np.ndarray:
    """Hermitian matrix of A(η) acting on the FFT coefficients of a cell function.

    H[p, q] = Σ_ij (k_p+η)_i Â_ij[p−q] (k_q+η)_j with Â = fftn(A)/n^N and indices in
    FFT order, flattened row-major.
    """
    n, dim = field.resolution, field.dimension
    _cell_points(field)
    eta = np.asarray(eta, dtype=float)
    axes = tuple(range(dim))
    a_hat = np.fft.fftn(field.values, axes=axes) / n**dim
    index = np.indices((n,) * dim).reshape(dim, -1).T
    wave = angular_wavenumbers(n, zero_nyquist=False)[index] + eta
    diff = (index[:, None, :] - index[None, :, :]) % n
    blocks = a_hat[tuple(diff[..., a] for a in axes)]
    matrix = np.einsum("pi,pqij,qj->pq", wave, blocks, wave)
    return 0.5 * (matrix + matrix.conj().T)


def bloch_basis(
    field: CoefficientField,
    eta: Sequence[float],
    bands: Optional[int] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """Lowest ``bands`` eigenpairs of A(η) (all n^N by default).

    Returns:
        Eigenvalues (ascending) and physical eigenvectors as columns of a
        (n^N, bands) array, each with mean|φ|² = 1 and a fixed phase.
    """
    total = _cell_points(field)
    count = total if bands is None else bands
    if not 1 <= count <= total:
        raise BandIndexError(count, total)
    matrix = fourier_matrix(field, eta)
    subset = None if count == total else [0, count - 1]
    values, vectors = linalg.eigh(matrix, subset_by_index=subset)

    shape = field.grid_shape
    axes = tuple(range(field.dimension))
    physical = np.empty((total, count), dtype=complex)
    for m in range(count):
        phi = np.fft.ifftn(vectors[:, m].reshape(shape), axes=axes)
        physical[:, m] = fix_phase(normalize(phi)).reshape(-1)
    return values, physical


def dual_indices(cells: int, dimension: int) -> np.ndarray:
    """Centred dual indices in FFT order, shape (M^N, N)."""
    axis = np.rint(np.fft.fftfreq(cells) * cells).astype(int)
    mesh = np.meshgrid(*([axis] * dimension), indexing="ij")
    return np.stack([m.reshape(-1) for m in mesh], axis=-1)


def global_points(cells: int, resolution: int, dimension: int) -> np.ndarray:
    """Sample points of the M·n global grid, shape (L,)*N + (N,)."""
    return cell_centers(cells * resolution, dimension)


def _split_cells(values: np.ndarray, cells: int, n: int, dim: int) -> np.ndarray:
    """(L,)*N -> (M,)*N + (n,)*N with global index c·n + j per axis."""
    arr = values.reshape(sum(([cells, n] for _ in range(dim)), []))
    return arr.transpose([2 * a for a in range(dim)] + [2 * a + 1 for a in range(dim)])


def _join_cells(blocks: np.ndarray, cells: int, n: int, dim: int) -> np.ndarray:
    order = sum(([a, dim + a] for a in range(dim)), [])
    return blocks.transpose(order).reshape((cells * n,) * dim)


def _cells_of(field: CoefficientField, values: np.ndarray) -> int:
    n, dim = field.resolution, field.dimension
    values = np.asarray(values)
    size = values.shape[0] if values.ndim else 0
    if values.ndim != dim or any(s != size for s in values.shape) or size % n:
        raise GridMismatchError("Grid function is not sampled on whole cells", (n,) * dim, values.shape)
    return size // n


def _phases(field: CoefficientField, cells: int, k: np.ndarray) -> np.ndarray:
    """e^{−2πi k·y/M} at the cell-local points y = (j+½)/n."""
    local = cell_centers(field.resolution, field.dimension)
    return np.exp(-2j * np.pi * (local @ k) / cells)


def decompose(
    field: CoefficientField,
    values: np.ndarray,
    bands: Optional[int] = None,
    threads: Optional[int] = None,
) -> BlochDecomposition:
    """Bloch coefficients of a grid function for every dual point.

    Args:
        field: Cell coefficient A.
        values: Function on the global grid, shape (M·n,)*N.
        bands: Keep only the lowest bands (all n^N by default).
        threads: Parallelism cap over dual points.

    Raises:
        GridMismatchError: ``values`` does not cover whole cells.
        BandIndexError: ``bands`` outside 1..n^N.
    """
    n, dim = field.resolution, field.dimension
    cells = _cells_of(field, values)
    points = n**dim
    volume = (cells * n) ** dim
    blocks = _split_cells(np.asarray(values, dtype=complex), cells, n, dim)
    spectra = np.fft.fftn(blocks, axes=tuple(range(dim))).reshape(cells**dim, points)
    duals = dual_indices(cells, dim)

    def solve(i: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        k = duals[i]
        eigenvalues, basis = bloch_basis(field, 2.0 * np.pi * k / cells, bands)
        local = _phases(field, cells, k).reshape(-1) * spectra[i]
        return eigenvalues, basis, basis.conj().T @ local / volume

    results = parallel_map(solve, range(len(duals)), threads=threads)
    energy = float(np.mean(np.abs(values) ** 2))
    decomposition = BlochDecomposition(
        cells=cells,
        resolution=n,
        dimension=dim,
        dual_indices=duals,
        coefficients=np.stack([r[2] for r in results]),
        eigenvalues=np.stack([r[0] for r in results]),
        bases=np.stack([r[1] for r in results]),
        energy=energy,
    )
    logger.debug(
        "Bloch decomposition: M=%d, n=%d, %d bands, Parseval residual %.2e",
        cells,
        n,
        decomposition.band_count,
        decomposition.parseval_residual,
    )
    return decomposition


def reconstruct(
    field: CoefficientField,
    decomposition: BlochDecomposition,
    coefficients: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Σ_m,k c_{m,k} ψ_{m,k} on the global grid (the decomposition's own coefficients
    by default)."""
    if decomposition.bases is None:
        raise ValidationError("Decomposition was built without bases", field="bases")
    n, dim, cells = decomposition.resolution, decomposition.dimension, decomposition.cells
    if (n, dim) != (field.resolution, field.dimension):
        raise GridMismatchError(
            "Decomposition built for another cell grid", (n, dim), (field.resolution, field.dimension)
        )
    coeff = decomposition.coefficients if coefficients is None else np.asarray(coefficients)
    local = np.einsum("kpm,km->kp", decomposition.bases, coeff)
    for i, k in enumerate(decomposition.dual_indices):
        local[i] *= np.conj(_phases(field, cells, k).reshape(-1))
    blocks = local.reshape((cells,) * dim + (n,) * dim)
    blocks = cells**dim * np.fft.ifftn(blocks, axes=tuple(range(dim)))
    return _join_cells(blocks, cells, n, dim)


def _dual_index(xi: Sequence[float], dimension: int) -> np.ndarray:
    scaled = np.asarray(xi, dtype=float).reshape(-1) / (2.0 * np.pi)
    if scaled.shape != (dimension,):
        raise DualGridError(f"ξ must have {dimension} entries")
    k = np.rint(scaled)
    if np.any(np.abs(scaled - k) > DUAL_GRID_TOL):
        raise DualGridError(f"ξ = {np.asarray(xi).tolist()} is not on the dual grid 2πZ^N")
    return k.astype(int)


def bloch_coefficient(
    field: CoefficientField,
    values: np.ndarray,
    band: int,
    xi: Sequence[float],
) -> complex:
    """B_m g(ξ) for one band (1-based) and one dual point ξ ∈ 2πZ^N.

    Raises:
        BandIndexError: ``band`` outside 1..n^N.
        DualGridError: ξ/2π not integer.
    """
    n, dim = field.resolution, field.dimension
    total = _cell_points(field)
    if not 1 <= band <= total:
        raise BandIndexError(band, total)
    k = _dual_index(xi, dim)
    cells = _cells_of(field, values)
    _, basis = bloch_basis(field, 2.0 * np.pi * k / cells, band)
    phi = basis[:, band - 1].reshape((n,) * dim)
    x = global_points(cells, n, dim)
    wave = np.exp(1j * (x @ (2.0 * np.pi * k))) * tile_periods(phi, cells, dim)
    return complex(np.mean(np.asarray(values) * np.conj(wave)))


def fourier_coefficient(values: np.ndarray, xi: Sequence[float]) -> complex:
    """(1/L^N) Σ_x g(x) e^{−i x·ξ} on the global grid."""
    values = np.asarray(values)
    x = cell_centers(values.shape[0], values.ndim)
    return complex(np.mean(values * np.exp(-1j * (x @ np.asarray(xi, dtype=float)))))


def compact_bump(points: np.ndarray, radius: float = 0.4) -> np.ndarray:
    """Smooth bump exp(1 − 1/(1 − r²)) supported in the ball of ``radius`` about the
    torus centre; ``points`` has shape (..., N)."""
    r2 = np.sum((np.asarray(points) - 0.5) ** 2, axis=-1) / radius**2
    inside = r2 < 1.0
    out = np.zeros(r2.shape)
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - r2[inside]))
    return out


def sample(g: GridFunction, cells: int, resolution: int, dimension: int) -> np.ndarray:
    """g at the global grid points."""
    return np.asarray(g(global_points(cells, resolution, dimension)))


def first_band_dominance(
    field: CoefficientField,
    g: GridFunction,
    cells_list: Sequence[int],
) -> ConvergenceTable:
    """L² remainder of g after its first-band reconstruction, per ε = 1/M."""
    rows: List[Dict[str, float]] = []
    for cells in cells_list:
        values = sample(g, cells, field.resolution, field.dimension)
        first = decompose(field, values, bands=1)
        remainder = values - reconstruct(field, first)
        rows.append({"eps": 1.0 / cells, "remainder": float(np.sqrt(np.mean(np.abs(remainder) ** 2)))})
    table = ConvergenceTable(columns=["eps", "remainder"], rows=rows)
    table.slopes["remainder"] = loglog_slope(table.column("eps"), table.column("remainder"))
    logger.info("First-band remainder slope %.3f over %d values of ε", table.slopes["remainder"], len(rows))
    return table


def bloch_vs_fourier(
    field: CoefficientField,
    g: GridFunction,
    cells_list: Sequence[int],
    max_frequency: int = 2,
) -> ConvergenceTable:
    """max over |k|∞ ≤ K of |B₁ g(2πk) − ĝ(2πk)| per ε = 1/M."""
    dim = field.dimension
    axis = np.arange(-max_frequency, max_frequency + 1)
    frequencies = np.stack([m.reshape(-1) for m in np.meshgrid(*([axis] * dim), indexing="ij")], axis=-1)
    rows: List[Dict[str, float]] = []
    for cells in cells_list:
        if cells <= 2 * max_frequency:
            raise ValidationError(
                f"M = {cells} cannot resolve frequencies up to {max_frequency}", field="cells", value=cells
            )
        values = sample(g, cells, field.resolution, dim)
        error = 0.0
        for k in frequencies:
            xi = 2.0 * np.pi * k
            error = max(error, abs(bloch_coefficient(field, values, 1, xi) - fourier_coefficient(values, xi)))
        rows.append({"eps": 1.0 / cells, "error": float(error)})
    table = ConvergenceTable(columns=["eps", "error"], rows=rows)
    table.slopes["error"] = loglog_slope(table.column("eps"), table.column("error"))
    logger.info("First Bloch coefficient vs Fourier slope %.3f", table.slopes["error"])
    return table


def global_operator(field: CoefficientField, values: np.ndarray) -> np.ndarray:
    """−div(A(x/ε)∇u) on the global grid by the Fourier path with the full symbol."""
    cells = _cells_of(field, values)
    dim = field.dimension
    grid = SpectralGrid(cells * field.resolution, dim)
    coeff = tile_periods(np.asarray(field.values), cells, dim)
    return grid.apply_operator(coeff, np.asarray(values, dtype=complex), np.zeros(dim))


def apply_operator_via_bloch(field: CoefficientField, values: np.ndarray) -> np.ndarray:
    """A^ε u as Σ λ_m^ε(ξ) B_m u(ξ) ψ_{m,k}."""
    decomposition = decompose(field, values)
    return reconstruct(field, decomposition, decomposition.scaled_eigenvalues * decomposition.coefficients)


def solve_via_bloch(field: CoefficientField, source: np.ndarray) -> np.ndarray:
    """Periodic u with A^ε u = f, dividing B_m f(ξ) by λ_m^ε(ξ) wherever it is positive.

    The kernel component (band 1 at ξ = 0) is dropped, so u has zero mean.
    """
    decomposition = decompose(field, source)
    scaled = decomposition.scaled_eigenvalues
    cutoff = KERNEL_FRACTION * float(np.max(scaled))
    active = scaled > cutoff
    coefficients = np.zeros_like(decomposition.coefficients)
    coefficients[active] = decomposition.coefficients[active] / scaled[active]
    return reconstruct(field, decomposition, coefficients)
