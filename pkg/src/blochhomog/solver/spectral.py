"""
Fourier-Galerkin discretization of divergence-form operators on the unit torus.

Derivatives are applied in Fourier space, coefficients multiply in physical space.
With dealiasing, gradients are interpolated to a 3/2-refined grid before the product
and the flux is restricted back with the exact adjoint, so the assembled operator
stays Hermitian. Quadratures are plain means over the nodes where the product is
formed.

Two symbols are used:
- the real corrector path zeroes the Nyquist wavenumber, so D maps real fields to
  real fields and its kernel is spanned by the mean and Nyquist-combination modes;
- the shifted (Bloch) path uses the full symbol i(k+η), keeping the constant the
  only kernel element at η = 0.
"""

from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from blochhomog.core.constants import FOURIER_GALERKIN
from blochhomog.core.models import CellSolution, CoefficientField, SolverConfig
from blochhomog.exceptions import GridMismatchError, ValidationError
from blochhomog.logging_config import get_logger
from blochhomog.solver.pcg import conjugate_gradient

logger = get_logger(__name__)

EtaLike = Optional[Sequence[float]]


def angular_wavenumbers(n: int, zero_nyquist: bool = True) -> np.ndarray:
    """2π·(0, 1, …, n/2−1, −n/2, …, −1), optionally with the Nyquist entry zeroed."""
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=1.0 / n)
    if zero_nyquist and n % 2 == 0:
        k[n // 2] = 0.0
    return k


class SpectralGrid:
    """FFT operators on an n^N cell-centred grid."""

    mode = FOURIER_GALERKIN

    def __init__(self, resolution: int, dimension: int, dealias: bool = False):
        self.resolution = resolution
        self.dimension = dimension
        self.dealias = dealias
        self.shape: Tuple[int, ...] = (resolution,) * dimension
        self.axes: Tuple[int, ...] = tuple(range(dimension))
        self.fine_resolution = (3 * resolution) // 2 if dealias else resolution

        self._k_real = [self._along(angular_wavenumbers(resolution, True), a) for a in self.axes]
        self._k_full = [self._along(angular_wavenumbers(resolution, False), a) for a in self.axes]
        kernel = np.ones(self.shape, dtype=bool)
        for k in self._k_real:
            kernel = kernel & (k == 0.0)
        self.kernel_mask = kernel

    @property
    def quadrature_shape(self) -> Tuple[int, ...]:
        return (self.fine_resolution,) * self.dimension

    def _along(self, values: np.ndarray, axis: int) -> np.ndarray:
        shape = [1] * self.dimension
        shape[axis] = values.size
        return values.reshape(shape)

    def wavevectors(self, eta: EtaLike = None) -> List[np.ndarray]:
        """Per-axis symbols: zero-Nyquist k for the real path, k+η otherwise."""
        if eta is None:
            return self._k_real
        eta = np.asarray(eta, dtype=float)
        return [self._k_full[a] + eta[a] for a in self.axes]

    def gradient(self, u: np.ndarray, eta: EtaLike = None) -> np.ndarray:
        """(∂ + iη)u, stacked on a trailing axis."""
        spectrum = np.fft.fftn(u, axes=self.axes)
        comps = [np.fft.ifftn(1j * k * spectrum, axes=self.axes) for k in self.wavevectors(eta)]
        grad = np.stack(comps, axis=-1)
        return grad.real if eta is None else grad

    def divergence_adjoint(self, flux: np.ndarray, eta: EtaLike = None) -> np.ndarray:
        """Adjoint of ``gradient``: −(∂ + iη)·flux."""
        total = np.zeros(self.shape, dtype=complex)
        for a, k in enumerate(self.wavevectors(eta)):
            total += -1j * k * np.fft.fftn(flux[..., a], axes=self.axes)
        out = np.fft.ifftn(total, axes=self.axes)
        return out.real if eta is None else out

    # Quadrature grid transfer

    def _embed(self, spectrum: np.ndarray, axis: int) -> np.ndarray:
        n, m = self.resolution, self.fine_resolution
        half = n // 2
        shape = list(spectrum.shape)
        shape[axis] = m
        fine = np.zeros(shape, dtype=complex)

        def sl(start, stop):
            index = [slice(None)] * spectrum.ndim
            index[axis] = slice(start, stop)
            return tuple(index)

        fine[sl(0, half)] = spectrum[sl(0, half)]
        fine[sl(m - half + 1, m)] = spectrum[sl(half + 1, n)]
        nyquist = 0.5 * spectrum[sl(half, half + 1)]
        fine[sl(half, half + 1)] = nyquist
        fine[sl(m - half, m - half + 1)] = nyquist
        return fine

    def _restrict(self, spectrum: np.ndarray, axis: int) -> np.ndarray:
        n, m = self.resolution, self.fine_resolution
        half = n // 2
        shape = list(spectrum.shape)
        shape[axis] = n
        coarse = np.zeros(shape, dtype=complex)

        def sl(start, stop):
            index = [slice(None)] * spectrum.ndim
            index[axis] = slice(start, stop)
            return tuple(index)

        coarse[sl(0, half)] = spectrum[sl(0, half)]
        coarse[sl(half + 1, n)] = spectrum[sl(m - half + 1, m)]
        coarse[sl(half, half + 1)] = 0.5 * (spectrum[sl(half, half + 1)] + spectrum[sl(m - half, m - half + 1)])
        return coarse

    def to_quadrature(self, values: np.ndarray) -> np.ndarray:
        """Trigonometric interpolation onto the quadrature grid (identity without dealiasing)."""
        if not self.dealias:
            return values
        spectrum = np.fft.fftn(values, axes=self.axes)
        for a in self.axes:
            spectrum = self._embed(spectrum, a)
        scale = (self.fine_resolution / self.resolution) ** self.dimension
        out = scale * np.fft.ifftn(spectrum, axes=self.axes)
        return out.real if np.isrealobj(values) else out

    def from_quadrature(self, values: np.ndarray) -> np.ndarray:
        """Scaled adjoint of ``to_quadrature``; inverts it on band-limited data."""
        if not self.dealias:
            return values
        spectrum = np.fft.fftn(values, axes=self.axes)
        for a in self.axes:
            spectrum = self._restrict(spectrum, a)
        scale = (self.resolution / self.fine_resolution) ** self.dimension
        out = scale * np.fft.ifftn(spectrum, axes=self.axes)
        return out.real if np.isrealobj(values) else out

    def quadrature_coefficients(self, field: CoefficientField) -> np.ndarray:
        """Coefficient values at the quadrature nodes, shape (*nodes, N, N)."""
        if field.grid_shape != self.shape:
            raise GridMismatchError("Field does not match the solver grid", self.shape, field.grid_shape)
        if not self.dealias:
            return np.asarray(field.values)
        fine = self.to_quadrature(np.asarray(field.values))
        fine = 0.5 * (fine + np.swapaxes(fine, -1, -2))
        if np.linalg.eigvalsh(fine)[..., 0].min() <= 0.0:
            raise ValidationError(
                "Interpolated coefficient loses positivity; dealiasing needs a smooth field",
                field="dealias",
            )
        return fine

    # Operators

    def flux_divergence(self, flux_q: np.ndarray, eta: EtaLike = None) -> np.ndarray:
        """Weak divergence D^H Q^H of a flux given on quadrature nodes."""
        return self.divergence_adjoint(self.from_quadrature(flux_q), eta)

    def apply_operator(self, coeff_q: np.ndarray, u: np.ndarray, eta: EtaLike = None) -> np.ndarray:
        """−(∂+iη)·[A(∂+iη)u] with the coefficient product on quadrature nodes."""
        grad = self.to_quadrature(self.gradient(u, eta))
        flux = np.einsum("...ij,...j->...i", coeff_q, grad)
        return self.flux_divergence(flux, eta)

    def preconditioner(
        self, scale: float, eta: EtaLike = None, shift: float = 0.0
    ) -> Callable[[np.ndarray], np.ndarray]:
        """Inverse of scale·|k+η|² + shift, zero on the operator kernel."""
        symbol = sum(k**2 for k in self.wavevectors(eta)) * scale + shift
        safe = np.where(symbol > 0.0, symbol, 1.0)
        inverse = np.where(symbol > 0.0, 1.0 / safe, 0.0)
        real = eta is None

        def apply(r: np.ndarray) -> np.ndarray:
            out = np.fft.ifftn(inverse * np.fft.fftn(r, axes=self.axes), axes=self.axes)
            return out.real if real else out

        return apply

    def project_kernel(self, u: np.ndarray) -> np.ndarray:
        """Remove the kernel of the real-path gradient (mean and Nyquist combinations)."""
        spectrum = np.fft.fftn(u, axes=self.axes)
        spectrum[self.kernel_mask] = 0.0
        return np.fft.ifftn(spectrum, axes=self.axes).real

    @staticmethod
    def coefficient_scale(coeff_q: np.ndarray) -> float:
        """mean(tr A)/N, the constant of the preconditioning Laplacian."""
        dim = coeff_q.shape[-1]
        return float(np.mean(np.trace(coeff_q, axis1=-2, axis2=-1))) / dim

    def flux_scale(self, coeff_q: np.ndarray, source_q: np.ndarray) -> float:
        """Bound on the H⁻¹-size of div(s) by the grid L² norm of s itself.

        Unlike the size of div(s), this does not vanish when s is nearly
        divergence-free.
        """
        points = self.resolution**self.dimension
        energy = float(np.mean(np.sum(np.abs(source_q) ** 2, axis=-1))) * points
        return float(np.sqrt(energy / self.coefficient_scale(coeff_q)))

    def relative_residual(
        self,
        coeff_q: np.ndarray,
        gradient_q: np.ndarray,
        source_q: np.ndarray,
        reference: Optional[float] = None,
    ) -> float:
        """H⁻¹-size of div(A∇w + s) relative to that of div(s), or to ``reference``."""
        precond = self.preconditioner(self.coefficient_scale(coeff_q))
        flux = np.einsum("...ij,...j->...i", coeff_q, gradient_q) + source_q
        r = self.flux_divergence(flux)
        num = np.sqrt(max(float(np.vdot(r, precond(r)).real), 0.0))
        if reference is None:
            b = self.flux_divergence(source_q)
            reference = np.sqrt(max(float(np.vdot(b, precond(b)).real), 0.0))
        return float(num / reference) if reference > 0.0 else float(num)

    def solve_flux_problem(
        self,
        coeff_q: np.ndarray,
        source_q: np.ndarray,
        cfg: SolverConfig,
        direction: int = 0,
        label: str = "cell",
        reference: Optional[float] = None,
    ) -> CellSolution:
        """Zero-mean periodic w with div(A∇w + s) = 0 by PCG from w = 0.

        ``reference`` replaces the size of div(s) in the stopping rule.
        """
        scale = self.coefficient_scale(coeff_q)
        rhs = -self.flux_divergence(source_q)
        result = conjugate_gradient(
            apply_op=lambda u: self.apply_operator(coeff_q, u),
            rhs=rhs,
            precondition=self.preconditioner(scale),
            tol=cfg.tol,
            max_iter=cfg.max_iter,
            project=self.project_kernel,
            label=label,
            reference=reference,
        )
        values = result.solution
        gradient = self.to_quadrature(self.gradient(values))
        logger.debug("%s: %d iterations, residual %.3e", label, result.iterations, result.residual)
        return CellSolution(
            values=values,
            gradient=gradient,
            residual=result.residual,
            iterations=result.iterations,
            direction=direction,
            history=result.history,
        )
