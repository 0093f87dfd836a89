"""
Unit tests for A*, B*, the B# assemblies, two-scale B#, bounds and the Lagrangian.
"""

import numpy as np
import pytest

from blochhomog.core.constants import ZETA
from blochhomog.core.models import HomogTensor
from blochhomog.exceptions import GridMismatchError, UnsupportedFactorError, ValidationError
from blochhomog.microstructure import PresetSpec, TrigTerm, build_field
from blochhomog.solver import solve_correctors, solve_psi_set
from blochhomog.tensors import (
    assemble_bsharp_energy,
    assemble_bsharp_flux,
    assemble_bsharp_perturbation,
    assemble_bsharp_twoscale,
    assemble_homogenized,
    check_bounds,
    corrector_gap,
    lagrangian_value,
    lagrangian_with_trial,
    psd_margin,
    tensor_distance,
    tensor_rows,
    tensor_to_text,
    twoscale_from_correctors,
)

CHECKERBOARD = PresetSpec(kind="checkerboard", phases=(1.0, 4.0))
LAMINATE_A = PresetSpec(kind="laminate", phases=(1.0, 4.0), fraction=0.5)
LAMINATE_B = PresetSpec(kind="laminate", phases=(2.0, 1.0), fraction=0.5)


def _trig(mean, amplitude, *factors):
    return PresetSpec(kind="trig-smooth", mean=mean, terms=(TrigTerm(amplitude=amplitude, factors=factors),))


SMOOTH_A_1D = _trig(2.0, 1.0, ("cos", 1.0))
SMOOTH_B_1D = _trig(3.0, 1.0, ("sin", 1.0))
SMOOTH_A_2D = _trig(2.0, 1.0, ("sin", 1.0), ("sin", 1.0))
SMOOTH_B_2D = _trig(3.0, 1.0, ("const", 0.0), ("cos", 1.0))
UPPER_LINK = "Bsharp <= (b2/a1)*Astar"


def _random_smooth(rng, mean):
    """Two random trig terms whose amplitudes stay below 0.8·mean."""
    terms = tuple(
        TrigTerm(
            amplitude=float(rng.uniform(-0.4, 0.4) * mean),
            factors=tuple((str(rng.choice(["sin", "cos"])), float(rng.integers(1, 3))) for _ in range(2)),
        )
        for _ in range(2)
    )
    return PresetSpec(kind="trig-smooth", mean=mean, terms=terms)


def _link(report, name):
    return next(link for link in report.links if link.name == name)


def _all_tensors(spec_a, spec_b, dimension, resolution, cfg):
    """A*, B* and the three B# forms, plus the ψ correctors."""
    field_a = build_field(spec_a, dimension, resolution)
    field_b = build_field(spec_b, dimension, resolution)
    chi = solve_correctors(field_a, cfg)
    zeta = solve_correctors(field_b, cfg, kind=ZETA)
    psi = solve_psi_set(field_a, field_b, chi, cfg)
    bstar = assemble_homogenized(field_b, zeta)
    tensors = {
        "astar": assemble_homogenized(field_a, chi),
        "bstar": bstar,
        "energy": assemble_bsharp_energy(field_b, chi),
        "flux": assemble_bsharp_flux(field_a, field_b, chi, psi),
        "perturbation": assemble_bsharp_perturbation(field_b, chi, zeta, bstar),
    }
    return tensors, chi, psi


@pytest.fixture
def laminate_problem(laminate_a, laminate_b, fd_cfg):
    """Fields and all correctors of the 1D two-phase problem at n = 16."""
    field_a = build_field(laminate_a, 1, 16)
    field_b = build_field(laminate_b, 1, 16)
    chi = solve_correctors(field_a, fd_cfg)
    zeta = solve_correctors(field_b, fd_cfg, kind=ZETA)
    psi = solve_psi_set(field_a, field_b, chi, fd_cfg)
    return field_a, field_b, chi, zeta, psi


@pytest.fixture
def smooth_problem(smooth_a, smooth_b, fourier_cfg):
    """Fields and all correctors of the smooth 2D problem at n = 16."""
    field_a = build_field(smooth_a, 2, 16)
    field_b = build_field(smooth_b, 2, 16)
    chi = solve_correctors(field_a, fourier_cfg)
    zeta = solve_correctors(field_b, fourier_cfg, kind=ZETA)
    psi = solve_psi_set(field_a, field_b, chi, fourier_cfg)
    return field_a, field_b, chi, zeta, psi


class TestLaminateTensors:
    """Closed-form 1D values: a* = 1.6, b* = 4/3, b# = 2.64."""

    def test_astar(self, laminate_problem):
        field_a, _, chi, _, _ = laminate_problem
        astar = assemble_homogenized(field_a, chi)
        assert astar.provenance == "Astar"
        assert astar.matrix[0, 0] == pytest.approx(1.6, abs=1e-12)

    def test_bstar(self, laminate_problem):
        _, field_b, _, zeta, _ = laminate_problem
        bstar = assemble_homogenized(field_b, zeta)
        assert bstar.provenance == "Bstar"
        assert bstar.matrix[0, 0] == pytest.approx(4.0 / 3.0, abs=1e-12)

    def test_bsharp_three_forms(self, laminate_problem):
        field_a, field_b, chi, zeta, psi = laminate_problem
        bstar = assemble_homogenized(field_b, zeta)
        energy = assemble_bsharp_energy(field_b, chi)
        flux = assemble_bsharp_flux(field_a, field_b, chi, psi)
        perturbation = assemble_bsharp_perturbation(field_b, chi, zeta, bstar)
        for tensor in (energy, flux, perturbation):
            assert tensor.matrix[0, 0] == pytest.approx(2.64, abs=1e-10)
        assert flux.extras["flux_averages"].shape == (1, 1)

    def test_twoscale_t_and_s(self, laminate_problem):
        _, field_b, chi, _, _ = laminate_problem
        t_mode = twoscale_from_correctors(field_b, chi, "t", 2)
        s_mode = twoscale_from_correctors(field_b, chi, "s-ratio", "2")
        assert t_mode.matrix[0, 0] == pytest.approx(2.04, abs=1e-10)
        assert s_mode.matrix[0, 0] == pytest.approx(2.04, abs=1e-10)
        assert t_mode.provenance == "Bsharp-twoscale-t"
        assert s_mode.provenance == "Bsharp-twoscale-s"

    def test_twoscale_half_factor(self, laminate_problem):
        _, field_b, chi, _, _ = laminate_problem
        tensor = twoscale_from_correctors(field_b, chi, "t", "1/2")
        assert tensor.extras == {"factor": "1/2", "periods": 2}
        assert tensor.matrix[0, 0] == pytest.approx(2.04, abs=1e-10)

    def test_twoscale_factor_one_reduces(self, laminate_problem):
        _, field_b, chi, _, _ = laminate_problem
        energy = assemble_bsharp_energy(field_b, chi)
        for mode in ("t", "s"):
            tensor = twoscale_from_correctors(field_b, chi, mode, 1)
            assert tensor_distance(tensor, energy) <= 1e-12

    def test_irrational_factor(self, laminate_problem):
        _, field_b, chi, _, _ = laminate_problem
        with pytest.raises(UnsupportedFactorError):
            twoscale_from_correctors(field_b, chi, "t", np.sqrt(2.0))

    def test_unknown_twoscale_mode(self, laminate_problem):
        _, field_b, chi, _, _ = laminate_problem
        with pytest.raises(ValidationError):
            twoscale_from_correctors(field_b, chi, "u", 2)

    def test_from_presets(self, laminate_a, laminate_b, fd_cfg):
        tensor = assemble_bsharp_twoscale(laminate_a, laminate_b, "t", 2, 16, cfg=fd_cfg)
        assert tensor.matrix[0, 0] == pytest.approx(2.04, abs=1e-10)

    def test_bsharp_needs_chi(self, laminate_problem):
        _, field_b, _, zeta, _ = laminate_problem
        with pytest.raises(ValidationError):
            assemble_bsharp_energy(field_b, zeta)

    def test_grid_mismatch(self, laminate_problem, laminate_b):
        _, _, chi, _, _ = laminate_problem
        coarse_b = build_field(laminate_b, 1, 8)
        with pytest.raises(GridMismatchError):
            assemble_bsharp_energy(coarse_b, chi)


class TestSmoothTensors:
    """Equivalences on a smooth 2D problem."""

    def test_astar_symmetric_positive(self, smooth_problem):
        field_a, _, chi, _, _ = smooth_problem
        astar = assemble_homogenized(field_a, chi)
        assert astar.asymmetry <= 1e-10
        assert astar.min_eigenvalue >= 1.0

    def test_bsharp_forms_agree(self, smooth_problem):
        field_a, field_b, chi, zeta, psi = smooth_problem
        bstar = assemble_homogenized(field_b, zeta)
        energy = assemble_bsharp_energy(field_b, chi)
        flux = assemble_bsharp_flux(field_a, field_b, chi, psi)
        perturbation = assemble_bsharp_perturbation(field_b, chi, zeta, bstar)
        assert tensor_distance(flux, energy) <= 1e-8
        assert tensor_distance(perturbation, energy) <= 1e-8
        assert psd_margin(bstar.matrix, energy.matrix) >= -1e-8

    def test_corrector_gap_vanishes_when_b_equals_a(self, smooth_a, fourier_cfg):
        field = build_field(smooth_a, 2, 8)
        chi = solve_correctors(field, fourier_cfg)
        zeta = solve_correctors(field, fourier_cfg, kind=ZETA)
        assert corrector_gap(chi, zeta) == 0.0

    def test_constant_coefficients(self, identity, fourier_cfg):
        field = build_field(identity, 2, 8)
        chi = solve_correctors(field, fourier_cfg)
        np.testing.assert_allclose(assemble_homogenized(field, chi).matrix, np.eye(2), atol=1e-14)


@pytest.mark.slow
class TestBsharpForms:
    """Energy, flux and perturbation forms of B# on 64-point grids."""

    @pytest.mark.parametrize(
        "spec_a, spec_b, dimension",
        [
            (SMOOTH_A_1D, SMOOTH_B_1D, 1),
            (LAMINATE_A, LAMINATE_B, 1),
            (SMOOTH_A_2D, SMOOTH_B_2D, 2),
            (CHECKERBOARD, LAMINATE_B, 2),
            (CHECKERBOARD, SMOOTH_B_2D, 2),
        ],
        ids=["smooth-1d", "laminate-1d", "smooth-2d", "checkerboard-laminate", "checkerboard-smooth"],
    )
    def test_forms_agree(self, spec_a, spec_b, dimension, fourier_cfg):
        tensors, _, _ = _all_tensors(spec_a, spec_b, dimension, 64, fourier_cfg)
        energy = tensors["energy"]
        assert tensor_distance(tensors["flux"], energy) <= 1e-8
        assert tensor_distance(tensors["perturbation"], energy) <= 1e-8
        assert psd_margin(tensors["bstar"].matrix, energy.matrix) >= -1e-8

    @pytest.mark.parametrize("dimension", [1, 2])
    def test_identity_a(self, identity, dimension, fourier_cfg):
        spec_b = SMOOTH_B_1D if dimension == 1 else SMOOTH_B_2D
        tensors, chi, _ = _all_tensors(identity, spec_b, dimension, 64, fourier_cfg)
        assert max(float(np.max(np.abs(s.values))) for s in chi.solutions) <= 1e-14
        mean_b = 3.0 * np.eye(dimension)
        np.testing.assert_allclose(tensors["energy"].matrix, mean_b, atol=1e-12)
        np.testing.assert_allclose(tensors["flux"].matrix, mean_b, atol=1e-12)
        # B* + ∫B∇ζ·∇ζ carries the ζ solve error linearly
        np.testing.assert_allclose(tensors["perturbation"].matrix, mean_b, atol=1e-9)


class TestProportionalCoefficients:
    """B = 3A: the ψ source is divergence-free and every B tensor collapses to 3A*."""

    @pytest.mark.parametrize(
        "spec_a, spec_b, atol",
        [
            (SMOOTH_A_2D, _trig(6.0, 3.0, ("sin", 1.0), ("sin", 1.0)), 1e-10),
            (CHECKERBOARD, PresetSpec(kind="checkerboard", phases=(3.0, 12.0)), 1e-9),
        ],
        ids=["smooth", "checkerboard"],
    )
    def test_collapse(self, spec_a, spec_b, atol, fourier_cfg):
        tensors, _, psi = _all_tensors(spec_a, spec_b, 2, 16, fourier_cfg)
        target = 3.0 * tensors["astar"].matrix
        for name in ("bstar", "energy", "flux", "perturbation"):
            np.testing.assert_allclose(tensors[name].matrix, target, atol=atol, err_msg=name)
        assert max(float(np.max(np.abs(s.gradient))) for s in psi.solutions) <= 1e-9
        assert max(psi.residuals) <= fourier_cfg.tol

    def test_laminate_fd(self, fd_cfg):
        tripled = PresetSpec(kind="laminate", phases=(3.0, 12.0), fraction=0.5)
        tensors, _, _ = _all_tensors(LAMINATE_A, tripled, 1, 16, fd_cfg)
        for name in ("bstar", "energy", "flux", "perturbation"):
            assert tensors[name].matrix[0, 0] == pytest.approx(4.8, abs=1e-10)


class TestLaminate2D:
    """Two-phase layers along y₁ separate into harmonic and arithmetic means."""

    def test_astar_diagonal(self, fourier_cfg):
        field = build_field(LAMINATE_A, 2, 16)
        astar = assemble_homogenized(field, solve_correctors(field, fourier_cfg))
        np.testing.assert_allclose(astar.matrix, np.diag([1.6, 2.5]), atol=1e-9)


class TestBounds:
    """Tests for the bound chain."""

    def test_laminate_chain(self, laminate_problem):
        field_a, field_b, chi, zeta, _ = laminate_problem
        report = check_bounds(
            field_a,
            field_b,
            assemble_homogenized(field_a, chi),
            assemble_homogenized(field_b, zeta),
            assemble_bsharp_energy(field_b, chi),
        )
        assert report.passed
        assert len(report.links) == 7
        assert report.links[-1].supplementary
        assert report.lower_harmonic[0, 0] == pytest.approx(4.0 / 3.0)
        assert report.upper_mean[0, 0] == pytest.approx(2.5)
        # B* = harmonic mean of b in 1D
        assert report.links[1].min_eigenvalue == pytest.approx(0.0, abs=1e-12)

    def test_violated_link_reported(self, laminate_problem):
        field_a, field_b, chi, zeta, _ = laminate_problem
        astar = assemble_homogenized(field_a, chi)
        bstar = assemble_homogenized(field_b, zeta)
        too_large = HomogTensor.from_raw(np.array([[10.0]]), "Bsharp-energy", 16, 1e-10)
        report = check_bounds(field_a, field_b, astar, bstar, too_large)
        assert not report.passed
        failed = [link.name for link in report.links if not link.passed]
        assert failed == ["Bsharp <= (b2/a1)*Astar"]

    def test_dimension_mismatch(self, laminate_problem):
        field_a, field_b, _, _, _ = laminate_problem
        wrong = HomogTensor.from_raw(np.eye(2), "Astar", 16, 1e-10)
        with pytest.raises(GridMismatchError):
            check_bounds(field_a, field_b, wrong, wrong, wrong)

    def test_psd_margin(self):
        assert psd_margin(np.eye(2), 3.0 * np.eye(2)) == pytest.approx(2.0)
        assert psd_margin(np.diag([1.0, 2.0]), np.eye(2)) == pytest.approx(-1.0)

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", range(10))
    def test_random_smooth_pairs(self, seed, fourier_cfg):
        rng = np.random.default_rng(seed)
        spec_a, spec_b = _random_smooth(rng, 2.0), _random_smooth(rng, 3.0)
        tensors, _, _ = _all_tensors(spec_a, spec_b, 2, 16, fourier_cfg)
        report = check_bounds(
            build_field(spec_a, 2, 16),
            build_field(spec_b, 2, 16),
            tensors["astar"],
            tensors["bstar"],
            tensors["energy"],
        )
        assert report.passed
        assert min(link.min_eigenvalue for link in report.links) >= -1e-8

    def test_upper_link_tight(self, fourier_cfg):
        # B = (b2/a1)A holds with a1 = a2 only, so A is constant here
        spec_a = PresetSpec(kind="constant", phases=(2.0,))
        spec_b = PresetSpec(kind="constant", phases=(3.0,))
        tensors, _, _ = _all_tensors(spec_a, spec_b, 2, 8, fourier_cfg)
        report = check_bounds(
            build_field(spec_a, 2, 8),
            build_field(spec_b, 2, 8),
            tensors["astar"],
            tensors["bstar"],
            tensors["energy"],
        )
        assert abs(_link(report, UPPER_LINK).min_eigenvalue) <= 1e-8

    def test_upper_link_gap_for_proportional_b(self, fourier_cfg):
        spec_b = _trig(6.0, 3.0, ("sin", 1.0), ("sin", 1.0))
        field_a, field_b = build_field(SMOOTH_A_2D, 2, 16), build_field(spec_b, 2, 16)
        tensors, _, _ = _all_tensors(SMOOTH_A_2D, spec_b, 2, 16, fourier_cfg)
        report = check_bounds(field_a, field_b, tensors["astar"], tensors["bstar"], tensors["energy"])
        expected = (field_b.beta / field_a.alpha - 3.0) * tensors["astar"].min_eigenvalue
        assert _link(report, UPPER_LINK).min_eigenvalue == pytest.approx(expected, rel=1e-8)


class TestLagrangian:
    """Tests for the min-max characterization."""

    def test_value_at_saddle(self, laminate_problem):
        field_a, field_b, chi, _, psi = laminate_problem
        result = lagrangian_value(field_a, field_b, [1.0], chi, psi)
        assert result.value == pytest.approx(2.64, abs=1e-10)
        assert result.cross_term == pytest.approx(0.0, abs=1e-10)

    def test_trial_independence(self, laminate_problem):
        field_a, field_b, chi, _, _ = laminate_problem
        rng = np.random.default_rng(5)
        trial = rng.standard_normal((32, 1))
        trial -= trial.mean()
        result = lagrangian_with_trial(field_a, field_b, [2.0], chi, trial)
        assert result.value == pytest.approx(4.0 * 2.64, abs=1e-9)

    def test_smooth_cross_term(self, smooth_problem):
        field_a, field_b, chi, _, psi = smooth_problem
        energy = assemble_bsharp_energy(field_b, chi)
        lam = np.array([0.6, -0.8])
        result = lagrangian_value(field_a, field_b, lam, chi, psi)
        assert abs(result.cross_term) <= 1e-8
        assert result.value == pytest.approx(lam @ energy.matrix @ lam, abs=1e-8)

    def test_random_directions(self, smooth_problem):
        field_a, field_b, chi, _, psi = smooth_problem
        bsharp = assemble_bsharp_energy(field_b, chi).matrix
        rng = np.random.default_rng(11)
        for lam in rng.standard_normal((20, 2)):
            result = lagrangian_value(field_a, field_b, lam, chi, psi)
            assert result.value == pytest.approx(lam @ bsharp @ lam, abs=1e-8)
            assert abs(result.cross_term) <= 1e-8

    def test_lambda_length(self, laminate_problem):
        field_a, field_b, chi, _, psi = laminate_problem
        with pytest.raises(ValidationError):
            lagrangian_value(field_a, field_b, [1.0, 0.0], chi, psi)


class TestTensorReport:
    """Tests for text and CSV serialization."""

    def test_text_block(self):
        tensor = HomogTensor.from_raw(np.array([[1.6]]), "Astar", 64, 1e-10)
        assert tensor_to_text(tensor).splitlines() == [
            "provenance: Astar",
            "N: 1",
            "n: 64",
            "row 1: 1.6000000000000001",
        ]

    def test_rows(self):
        tensor = HomogTensor.from_raw(np.array([[2.0, 0.5], [0.5, 3.0]]), "Bstar", 8, 1e-10)
        rows = tensor_rows([tensor])
        assert len(rows) == 4
        assert rows[1] == {"provenance": "Bstar", "N": 2, "n": 8, "row": 1, "col": 2, "value": 0.5}

    def test_symmetrized_with_asymmetry(self):
        tensor = HomogTensor.from_raw(np.array([[1.0, 0.2], [0.0, 1.0]]), "Astar", 8, 1e-10)
        assert tensor.asymmetry == pytest.approx(0.2)
        assert tensor.matrix[0, 1] == pytest.approx(0.1)
