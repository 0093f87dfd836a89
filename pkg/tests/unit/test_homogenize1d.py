"""
Unit tests for the 1D ε-problems, analytic limits and flux convergence tables.
"""

from fractions import Fraction

import numpy as np
import pytest

from blochhomog.exceptions import GridMismatchError, ValidationError
from blochhomog.homogenize1d import (
    LIMIT_BSHARP,
    LIMIT_BSTAR,
    EpsilonProblem,
    analytic_1d_limits,
    antiderivative_norm,
    breakpoints,
    flux_convergence,
    solve_adjoint_1d,
    solve_state_1d,
)
from blochhomog.microstructure.presets import PresetSpec

DYADIC = [8, 16, 32, 64]


class TestBreakpoints:
    """Tests for breakpoints function."""

    def test_laminate(self, laminate_a):
        assert breakpoints(laminate_a) == [Fraction(0), Fraction(1, 2)]

    def test_constant(self, identity):
        assert breakpoints(identity) == []

    def test_disk_inclusion(self):
        spec = PresetSpec(kind="disk-inclusion", phases=(1.0, 3.0), fraction=0.5)
        assert breakpoints(spec) == [Fraction(1, 4), Fraction(3, 4)]

    def test_smooth_has_none(self, smooth_1d):
        assert breakpoints(smooth_1d) is None

    def test_laminate_axis(self):
        spec = PresetSpec(kind="laminate", phases=(1.0, 2.0), axis=2)
        with pytest.raises(ValidationError):
            breakpoints(spec)


class TestAnalyticLimits:
    """Closed-form a*, b*, b#."""

    def test_laminate(self, laminate_a, laminate_b):
        limits = analytic_1d_limits(laminate_a, laminate_b)
        assert limits.astar == pytest.approx(1.6, abs=1e-14)
        assert limits.bstar == pytest.approx(4.0 / 3.0, abs=1e-14)
        assert limits.bsharp == pytest.approx(2.64, abs=1e-13)

    def test_twoscale(self, laminate_a, laminate_b):
        assert analytic_1d_limits(laminate_a, laminate_b, 2).bsharp == pytest.approx(2.04, abs=1e-13)
        assert analytic_1d_limits(laminate_a, laminate_b, "1/2").bsharp == pytest.approx(2.04, abs=1e-13)

    def test_bsharp_equals_bstar_when_b_is_a(self, laminate_a):
        limits = analytic_1d_limits(laminate_a, laminate_a)
        assert limits.bsharp == pytest.approx(limits.bstar, abs=1e-14)

    def test_not_piecewise(self, laminate_a, smooth_1d):
        with pytest.raises(ValidationError):
            analytic_1d_limits(laminate_a, smooth_1d)

    def test_to_dict(self, laminate_a, laminate_b):
        assert analytic_1d_limits(laminate_a, laminate_b, 2).to_dict()["factor"] == "2"


class TestEpsilonProblem:
    """Tests for EpsilonProblem construction and coefficients."""

    def test_segments(self, laminate_a, laminate_b):
        prob = EpsilonProblem(laminate_a, laminate_b, cells=2)
        assert prob.elements == 64
        np.testing.assert_allclose(prob.a_segments()[:16], 1.0)
        np.testing.assert_allclose(prob.a_segments()[16:32], 4.0)
        np.testing.assert_allclose(prob.b_segments()[:16], 2.0)

    def test_coarse_cell_resolution(self, laminate_a, laminate_b):
        with pytest.raises(ValidationError):
            EpsilonProblem(laminate_a, laminate_b, cells=4, cell_resolution=16)

    def test_jump_off_grid(self, laminate_b):
        a_spec = PresetSpec(kind="laminate", phases=(1.0, 2.0), fraction=Fraction(1, 3))
        with pytest.raises(ValidationError):
            EpsilonProblem(a_spec, laminate_b, cells=4)

    def test_factor_jump_off_grid(self, laminate_a, laminate_b):
        with pytest.raises(ValidationError):
            EpsilonProblem(laminate_a, laminate_b, cells=8, factor=Fraction(3, 2))

    def test_load_vector_sums_to_integral(self, laminate_a, laminate_b):
        prob = EpsilonProblem(laminate_a, laminate_b, cells=4, source=lambda x: 2.0 * x)
        assert prob.load_vector().sum() == pytest.approx(1.0, abs=1e-14)


class TestSolvers:
    """Tests for the state and adjoint solves."""

    def test_constant_state(self, identity):
        sol = solve_state_1d(EpsilonProblem(identity, identity, 1))
        np.testing.assert_allclose(sol.u, sol.nodes * (1.0 - sol.nodes) / 2.0, atol=1e-14)

    def test_flux_is_linear(self, laminate_a, laminate_b):
        prob = EpsilonProblem(laminate_a, laminate_b, cells=8)
        sol = solve_state_1d(prob)
        np.testing.assert_allclose(np.diff(sol.sigma), -prob.h, atol=1e-12)

    def test_adjoint_flux_constant(self, laminate_a, laminate_b):
        prob = EpsilonProblem(laminate_a, laminate_b, cells=8)
        state = solve_state_1d(prob)
        adjoint = solve_adjoint_1d(prob, state)
        assert adjoint.z_spread <= 1e-12
        assert adjoint.p[0] == 0.0
        assert abs(adjoint.p[-1]) <= 1e-12

    def test_adjoint_grid_mismatch(self, laminate_a, laminate_b):
        state = solve_state_1d(EpsilonProblem(laminate_a, laminate_b, cells=4))
        with pytest.raises(GridMismatchError):
            solve_adjoint_1d(EpsilonProblem(laminate_a, laminate_b, cells=8), state)


class TestFluxConvergence:
    """Tests for flux_convergence function."""

    def test_antiderivative_norm(self):
        assert antiderivative_norm(np.ones(2), 0.5) == pytest.approx(np.sqrt(1.25 / 3.0))

    def test_needs_four_eps(self, laminate_a, laminate_b):
        with pytest.raises(ValidationError):
            flux_convergence(laminate_a, laminate_b, 1, [8, 16, 32])

    def test_needs_dyadic(self, laminate_a, laminate_b):
        with pytest.raises(ValidationError):
            flux_convergence(laminate_a, laminate_b, 1, [8, 12, 16, 32])

    def test_unknown_limit(self, laminate_a, laminate_b):
        with pytest.raises(ValidationError):
            flux_convergence(laminate_a, laminate_b, 1, DYADIC, limit="bflat")

    def test_sigma_converges_at_first_order(self, laminate_a, laminate_b):
        table = flux_convergence(laminate_a, laminate_b, 1, DYADIC)
        assert list(table.column("eps")) == [1 / 8, 1 / 16, 1 / 32, 1 / 64]
        assert table.slopes["errSigma"] == pytest.approx(1.0, abs=0.05)
        assert np.all(table.column("zSpread") <= 1e-12)

    def test_bstar_control_plateaus(self, laminate_a, laminate_b):
        sharp = flux_convergence(laminate_a, laminate_b, 1, DYADIC, limit=LIMIT_BSHARP)
        control = flux_convergence(laminate_a, laminate_b, 1, DYADIC, limit=LIMIT_BSTAR)
        control_z = control.column("errZ")
        assert control_z[-1] > 0.5 * control_z[0]
        assert sharp.column("errZ")[-1] < 0.1 * control_z[-1]

    def test_twoscale_factor(self, laminate_a, laminate_b):
        table = flux_convergence(laminate_a, laminate_b, 2, DYADIC)
        errors = table.column("errZ")
        assert np.all(np.diff(errors) < 0.0)

    @pytest.mark.slow
    def test_sharp_z_rate_and_control_gap(self, laminate_a, laminate_b):
        cells = DYADIC + [128]
        sharp = flux_convergence(laminate_a, laminate_b, 1, cells, limit=LIMIT_BSHARP)
        control = flux_convergence(laminate_a, laminate_b, 1, cells, limit=LIMIT_BSTAR)
        assert sharp.slopes["errZ"] >= 0.9
        assert control.column("errZ")[-1] >= 10.0 * sharp.column("errZ")[-1]
