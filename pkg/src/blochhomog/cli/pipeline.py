"""
Verification pipeline behind ``bloch-homog``.

Stages run in dependency order (correctors -> tensors -> Bloch -> experiments) and
share solved correctors through the Pipeline cache. Every stage records its results
and pass/fail checks on a RunReport.
"""

import time
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from blochhomog.bloch import (
    apply_operator_via_bloch,
    bloch_vs_fourier,
    compact_bump,
    decompose,
    dispersion,
    dispersion_columns,
    first_band_dominance,
    global_operator,
    global_points,
    gradient_at_zero,
    mode_derivative_error,
    nu1,
    point_key,
    reconstruct,
    solve_via_bloch,
    spectral_tensors,
    stencil_modes,
)
from blochhomog.cli.report import Check, RunReport, emit_report
from blochhomog.cli.run_config import RunConfig
from blochhomog.config import get_config
from blochhomog.core.constants import (
    ASTAR,
    BSHARP_ENERGY,
    BSHARP_FLUX,
    BSHARP_PERTURBATION,
    BSHARP_TWOSCALE_T,
    BSTAR,
    CHI,
    EQUIVALENCE_TOL,
    EXIT_CHECK_FAILED,
    EXIT_CONFIG_ERROR,
    EXIT_OK,
    EXIT_REPORT_ERROR,
    EXIT_SOLVER_ERROR,
    FD_HARMONIC,
    FOURIER_GALERKIN,
    HESSIAN_LAMBDA,
    HESSIAN_MU,
    HESSIAN_NU,
    HESSIAN_NU_TWOSCALE,
    MEAN_TOL,
    MODE_ALL,
    MODE_BLOCH,
    MODE_BOUNDS,
    MODE_CONVERGE,
    MODE_ORDER,
    MODE_TENSORS,
    MODE_TRANSFORM,
    MODE_VARIATIONAL,
    PSD_TOL,
    PSI,
    TENSOR_SYMMETRY_TOL,
    ZETA,
)
from blochhomog.core.models import CoefficientField, CorrectorSet, HomogTensor, SolverConfig
from blochhomog.exceptions import (
    BlochHomogError,
    ConfigurationError,
    GridMismatchError,
    ValidationError,
)
from blochhomog.homogenize1d import (
    CONVERGENCE_COLUMNS,
    LIMIT_BSHARP,
    LIMIT_BSTAR,
    analytic_1d_limits,
    breakpoints,
    flux_convergence,
)
from blochhomog.logging_config import get_logger
from blochhomog.microstructure.presets import CONSTANT, TRIG_SMOOTH, PresetSpec, build_field
from blochhomog.solver import competitor_energy, residual_rows, solve_correctors, solve_psi_set, trial_gradient
from blochhomog.tensors import (
    assemble_bsharp_energy,
    assemble_bsharp_flux,
    assemble_bsharp_perturbation,
    assemble_homogenized,
    check_bounds,
    corrector_gap,
    lagrangian_value,
    lagrangian_with_trial,
    tensor_distance,
    tensor_rows,
    twoscale_from_correctors,
)
from blochhomog.tensors.report import TENSOR_COLUMNS

logger = get_logger(__name__)

# Acceptance thresholds
ORACLE_TOL = 1e-10
TWOSCALE_REDUCTION_TOL = 1e-12
GROUND_STATE_TOL = 1e-12
GRADIENT_TOL = 1e-8
SPECTRAL_TOL = 1e-3
TIME_REVERSAL_TOL = 1e-10
NORMALIZATION_TOL = 1e-12
DERIVATIVE_STEPS = (1e-2, 5e-3)
DERIVATIVE_RATIO = (1.5, 2.5)
DERIVATIVE_FLOOR = 1e-9
TRANSFORM_TOL = 1e-10
BLOCH_OPERATOR_TOL = 1e-9
MIN_SLOPE = 0.9
SLOPE_FLOOR = 1e-10
PLATEAU_FACTOR = 10.0
SPREAD_TOL = 1e-12
# A generic dual point (fraction of π per axis) for the time-reversal check
REVERSAL_POINT = (0.37, -0.21)
DISPERSION_FRACTIONS = (0.0, 0.125, 0.25, 0.375, 0.5, 0.625, 0.75)

CONFIG_ERRORS = (ConfigurationError, ValidationError, GridMismatchError)


def _smooth(spec: PresetSpec) -> bool:
    return spec.kind in (CONSTANT, TRIG_SMOOTH)


def _sharp_piecewise(spec: PresetSpec) -> bool:
    return breakpoints(spec) is not None and spec.smoothing == 0.0


class Pipeline:
    """Shared state of one run: coefficient fields and cached cell solutions."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.report = RunReport(config=config.to_dict())
        self._fields: Optional[Tuple[CoefficientField, CoefficientField]] = None
        self._correctors: Dict[Tuple[str, str, bool], CorrectorSet] = {}
        self._tensors: Dict[Tuple[str, bool], Dict[str, HomogTensor]] = {}

    # ------------------------------------------------------------------ cache

    @property
    def fields(self) -> Tuple[CoefficientField, CoefficientField]:
        if self._fields is None:
            cfg = self.config
            self._fields = (
                build_field(cfg.a_spec, cfg.dimension, cfg.resolution),
                build_field(cfg.b_spec, cfg.dimension, cfg.resolution),
            )
        return self._fields

    def fourier_config(self) -> SolverConfig:
        solver = self.config.solver
        if solver.mode == FOURIER_GALERKIN:
            return solver
        return SolverConfig(tol=solver.tol, max_iter=solver.max_iter, mode=FOURIER_GALERKIN)

    def correctors(self, kind: str, cfg: SolverConfig) -> CorrectorSet:
        key = (kind, cfg.mode, cfg.dealias)
        if key not in self._correctors:
            field_a, field_b = self.fields
            if kind == CHI:
                self._correctors[key] = solve_correctors(field_a, cfg, kind=CHI)
            elif kind == ZETA:
                self._correctors[key] = solve_correctors(field_b, cfg, kind=ZETA)
            else:
                chi = self.correctors(CHI, cfg)
                self._correctors[key] = solve_psi_set(field_a, field_b, chi, cfg)
        return self._correctors[key]

    def tensors(self, cfg: SolverConfig) -> Dict[str, HomogTensor]:
        """A*, B* and the three B# assemblies for one discretization."""
        key = (cfg.mode, cfg.dealias)
        if key not in self._tensors:
            field_a, field_b = self.fields
            chi = self.correctors(CHI, cfg)
            zeta = self.correctors(ZETA, cfg)
            psi = self.correctors(PSI, cfg)
            bstar = assemble_homogenized(field_b, zeta)
            self._tensors[key] = {
                ASTAR: assemble_homogenized(field_a, chi),
                BSTAR: bstar,
                BSHARP_ENERGY: assemble_bsharp_energy(field_b, chi),
                BSHARP_FLUX: assemble_bsharp_flux(field_a, field_b, chi, psi),
                BSHARP_PERTURBATION: assemble_bsharp_perturbation(field_b, chi, zeta, bstar),
            }
        return self._tensors[key]

    # ----------------------------------------------------------------- stages

    def run_tensors(self) -> None:
        cfg = self.config.solver
        report = self.report
        field_a, field_b = self.fields
        tensors = dict(self.tensors(cfg))
        chi = self.correctors(CHI, cfg)

        tensors_out = list(tensors.values())
        if self.config.twoscale_factor is not None:
            twoscale = twoscale_from_correctors(
                field_b, chi, self.config.twoscale_mode, self.config.twoscale_factor
            )
            tensors[twoscale.provenance] = twoscale
            tensors_out.append(twoscale)
        reduced = twoscale_from_correctors(field_b, chi, self.config.twoscale_mode, 1)
        report.add_check(
            Check.at_most(
                "twoscale factor 1 reduces to Bsharp-energy",
                tensor_distance(reduced, tensors[BSHARP_ENERGY]),
                TWOSCALE_REDUCTION_TOL,
            )
        )

        energy = tensors[BSHARP_ENERGY]
        for other in (BSHARP_FLUX, BSHARP_PERTURBATION):
            report.add_check(
                Check.at_most(
                    f"{BSHARP_ENERGY} == {other}", tensor_distance(energy, tensors[other]), EQUIVALENCE_TOL
                )
            )
        for tensor in tensors_out:
            # The flux form is symmetric only up to the discrete div-curl identity
            limit = EQUIVALENCE_TOL if tensor.provenance == BSHARP_FLUX else TENSOR_SYMMETRY_TOL
            report.add_check(Check.at_most(f"{tensor.provenance} symmetric", tensor.asymmetry, limit))
        report.add_check(
            Check.at_least(f"{ASTAR} >= a1*I", tensors[ASTAR].min_eigenvalue - field_a.alpha, -PSD_TOL)
        )
        report.add_check(
            Check.at_least(f"{BSTAR} >= b1*I", tensors[BSTAR].min_eigenvalue - field_b.alpha, -PSD_TOL)
        )

        residual_table: List[Dict[str, Any]] = []
        for kind in (CHI, ZETA, PSI):
            correctors = self.correctors(kind, cfg)
            means = max(abs(s.mean) for s in correctors.solutions)
            report.add_check(Check.at_most(f"{kind} zero mean", means, MEAN_TOL))
            report.add_check(Check.at_most(f"{kind} residual", max(correctors.residuals), cfg.tol))
            residual_table.extend(residual_rows(correctors))
        report.add_rows("residuals", ["kind", "direction", "iteration", "residual"], residual_table)

        gap = corrector_gap(chi, self.correctors(ZETA, cfg))
        self._oracle_checks(tensors)

        report.add_rows("tensors", TENSOR_COLUMNS, tensor_rows(tensors_out))
        report.results[MODE_TENSORS] = {
            "tensors": {name: tensor.to_dict() for name, tensor in tensors.items()},
            "corrector_gap": gap,
        }

    def _oracle_checks(self, tensors: Dict[str, HomogTensor]) -> None:
        """Closed-form 1D values against the exact fd-harmonic assemblies."""
        cfg = self.config
        if cfg.solver.mode != FD_HARMONIC or not (_sharp_piecewise(cfg.a_spec) and _sharp_piecewise(cfg.b_spec)):
            return
        limits = analytic_1d_limits(cfg.a_spec, cfg.b_spec)
        expected = {ASTAR: limits.astar, BSTAR: limits.bstar, BSHARP_ENERGY: limits.bsharp}
        if cfg.twoscale_factor is not None and cfg.twoscale_mode == "t":
            expected[BSHARP_TWOSCALE_T] = analytic_1d_limits(cfg.a_spec, cfg.b_spec, cfg.twoscale_factor).bsharp
        for name, value in expected.items():
            self.report.add_check(
                Check.at_most(
                    f"{name} matches closed-form 1D value",
                    abs(float(tensors[name].matrix[0, 0]) - value),
                    ORACLE_TOL,
                )
            )

    def run_bounds(self) -> None:
        field_a, field_b = self.fields
        tensors = self.tensors(self.config.solver)
        bounds = check_bounds(field_a, field_b, tensors[ASTAR], tensors[BSTAR], tensors[BSHARP_ENERGY])
        for link in bounds.links:
            self.report.add_check(
                Check.at_least(link.name, link.min_eigenvalue, -PSD_TOL, reason="bound_violated")
            )
        self.report.results[MODE_BOUNDS] = bounds.to_dict()

    def run_variational(self) -> None:
        cfg = self.config.solver
        field_a, field_b = self.fields
        tensors = self.tensors(cfg)
        chi = self.correctors(CHI, cfg)
        psi = self.correctors(PSI, cfg)
        bstar = tensors[BSTAR].matrix
        bsharp = tensors[BSHARP_ENERGY].matrix
        rng = np.random.default_rng(self.config.seed)
        fourier = cfg.mode == FOURIER_GALERKIN

        value_gap = cross = energy_gap = trial_gap = 0.0
        ordering = np.inf
        for _ in range(self.config.samples):
            lam = rng.standard_normal(field_a.dimension)
            quad_sharp = float(lam @ bsharp @ lam)
            quad_star = float(lam @ bstar @ lam)
            value = lagrangian_value(field_a, field_b, lam, chi, psi)
            value_gap = max(value_gap, abs(value.value - quad_sharp))
            cross = max(cross, abs(value.cross_term))
            ordering = min(ordering, quad_sharp - quad_star)

            _, grad_chi = chi.combine(lam)
            trials = [grad_chi, np.zeros_like(grad_chi)]
            if fourier:
                noise = rng.standard_normal(field_b.grid_shape)
                random_grad = trial_gradient(field_b, noise, cfg)
                trials.append(random_grad)
                with_trial = lagrangian_with_trial(field_a, field_b, lam, chi, random_grad)
                trial_gap = max(trial_gap, abs(with_trial.value - quad_sharp))
            for grad in trials:
                energy = competitor_energy(field_b, lam, grad, cfg)
                energy_gap = max(energy_gap, quad_star - energy)

        report = self.report
        report.add_check(Check.at_most("Lagrangian equals Bsharp quadratic form", value_gap, EQUIVALENCE_TOL))
        report.add_check(Check.at_most("Lagrangian cross term vanishes", cross, EQUIVALENCE_TOL))
        report.add_check(Check.at_most("Bstar quadratic form below trial energies", energy_gap, PSD_TOL))
        report.add_check(Check.at_least("Bsharp quadratic form above Bstar", ordering, -PSD_TOL))
        if fourier:
            report.add_check(
                Check.at_most("Lagrangian independent of the second argument", trial_gap, EQUIVALENCE_TOL)
            )
        report.results[MODE_VARIATIONAL] = {
            "samples": self.config.samples,
            "max_value_gap": value_gap,
            "max_cross_term": cross,
            "min_sharp_minus_star": ordering,
            "max_trial_gap": trial_gap if fourier else None,
        }

    def run_bloch(self) -> None:
        cfg = self.fourier_config()
        step = self.config.fd_step
        field_a, field_b = self.fields
        dim = field_a.dimension
        basis = np.eye(dim)
        report = self.report

        derivative_points = [h * basis[k] for h in DERIVATIVE_STEPS for k in range(dim)]
        reversal = np.pi * np.array(REVERSAL_POINT[:dim])
        eigen_tol = self.config.eigen_tol
        factor = self.config.twoscale_factor
        if factor is not None and (self.config.twoscale_mode != "t" or factor.denominator != 1):
            factor = None
        pairs = stencil_modes(
            field_a,
            field_b,
            cfg,
            step,
            extra_points=derivative_points + [reversal, -reversal],
            eigen_tol=eigen_tol,
        )
        hessians = spectral_tensors(field_a, field_b, cfg, step, modes=pairs, twoscale_factor=factor)
        reference = dict(self.tensors(cfg))
        targets = [(HESSIAN_LAMBDA, ASTAR), (HESSIAN_MU, BSTAR), (HESSIAN_NU, BSHARP_ENERGY)]
        if factor is not None:
            chi_fourier = self.correctors(CHI, cfg)
            reference[BSHARP_TWOSCALE_T] = twoscale_from_correctors(field_b, chi_fourier, "t", factor)
            targets.append((HESSIAN_NU_TWOSCALE, BSHARP_TWOSCALE_T))

        for provenance, target in targets:
            distance = tensor_distance(hessians[provenance], reference[target], relative=True)
            report.add_check(Check.at_most(f"{provenance} matches {target}", distance, SPECTRAL_TOL))

        zero = pairs[point_key(np.zeros(dim))]
        nu_zero = nu1(field_b, zero[0], dealias=cfg.dealias)
        report.add_check(Check.at_most("lambda1(0) vanishes", abs(zero[0].eigenvalue), GROUND_STATE_TOL))
        report.add_check(Check.at_most("nu1(0) vanishes", abs(nu_zero), GROUND_STATE_TOL))

        def lam_map(eta: np.ndarray) -> float:
            return pairs[point_key(eta)][0].eigenvalue

        def nu_map(eta: np.ndarray) -> float:
            return nu1(field_b, pairs[point_key(eta)][0], dealias=cfg.dealias)

        grad_lambda = gradient_at_zero(lam_map, step, dim, threads=1)
        grad_nu = gradient_at_zero(nu_map, step, dim, threads=1)
        report.add_check(
            Check.at_most("grad lambda1(0) vanishes", float(np.max(np.abs(grad_lambda))), GRADIENT_TOL)
        )
        report.add_check(Check.at_most("grad nu1(0) vanishes", float(np.max(np.abs(grad_nu))), GRADIENT_TOL))

        plus, minus = pairs[point_key(reversal)][0], pairs[point_key(-reversal)][0]
        report.add_check(
            Check.at_most(
                "lambda1 time-reversal symmetric",
                abs(plus.eigenvalue - minus.eigenvalue),
                TIME_REVERSAL_TOL,
            )
        )
        norms = [abs(float(np.mean(np.abs(a.vector) ** 2)) - 1.0) for a, _ in pairs.values()]
        report.add_check(Check.at_most("Bloch modes normalized", max(norms), NORMALIZATION_TOL))

        chi = self.correctors(CHI, cfg)
        ratios = []
        for k in range(dim):
            errors = [
                mode_derivative_error(pairs[point_key(h * basis[k])][0], zero[0], chi.solutions[k].values, h)
                for h in DERIVATIVE_STEPS
            ]
            name = f"eigenvector derivative along e{k + 1}"
            if errors[0] <= DERIVATIVE_FLOOR:
                report.add_check(Check.at_most(name + " exact", errors[0], DERIVATIVE_FLOOR))
                continue
            ratio = errors[0] / errors[1]
            ratios.append(ratio)
            lo, hi = DERIVATIVE_RATIO
            report.add_check(Check.at_least(name + " ratio above " + str(lo), ratio, lo, reason="not_first_order"))
            report.add_check(Check.at_most(name + " ratio below " + str(hi), ratio, hi, reason="not_first_order"))

        etas = self.config.etas or [[np.pi * s] + [0.0] * (dim - 1) for s in DISPERSION_FRACTIONS]
        rows = dispersion(field_a, field_b, etas, cfg, eigen_tol=eigen_tol)
        lowest = min(min(row["lambda1"], row["mu1"], row["nu1"]) for row in rows)
        report.add_check(Check.at_least("dispersion nonnegative", lowest, -GROUND_STATE_TOL))
        report.add_rows("dispersion", dispersion_columns(dim), rows)
        report.add_rows("tensors", TENSOR_COLUMNS, tensor_rows(list(hessians.values())))

        report.results[MODE_BLOCH] = {
            "fd_step": step,
            "eigen_tol": eigen_tol,
            "outer_iterations": sum(a.iterations + b.iterations for a, b in pairs.values()),
            "hessians": {name: tensor.to_dict() for name, tensor in hessians.items()},
            "reference": {target: reference[target].to_dict() for _, target in targets},
            "lambda1_zero": zero[0].eigenvalue,
            "nu1_zero": nu_zero,
            "grad_lambda1": grad_lambda,
            "grad_nu1": grad_nu,
            "derivative_ratios": ratios,
            "near_degenerate": sorted(
                [list(key) for key, (a, b) in pairs.items() if a.near_degenerate or b.near_degenerate]
            ),
        }

    def run_transform(self) -> None:
        cfg = self.config
        report = self.report
        dim = cfg.dimension
        field = build_field(cfg.a_spec, dim, cfg.transform_resolution)
        cells = cfg.transform_cells
        rng = np.random.default_rng(cfg.seed)
        shape = (cells * field.resolution,) * dim

        values = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        decomposition = decompose(field, values)
        rebuilt = reconstruct(field, decomposition)
        report.add_check(Check.at_most("Parseval identity", decomposition.parseval_residual, TRANSFORM_TOL))
        report.add_check(
            Check.at_most(
                "reconstruct inverts decompose",
                float(np.max(np.abs(rebuilt - values)) / np.max(np.abs(values))),
                TRANSFORM_TOL,
            )
        )

        source = values.real - np.mean(values.real)
        solution = solve_via_bloch(field, source)
        applied = apply_operator_via_bloch(field, solution)
        solve_error = float(np.max(np.abs(applied - source)) / np.max(np.abs(source)))
        report.add_check(Check.at_most("Bloch solve inverts the operator", solve_error, BLOCH_OPERATOR_TOL))

        operator_error: Optional[float] = None
        if _smooth(cfg.a_spec):
            x = global_points(cells, field.resolution, dim)
            smooth = np.sin(2.0 * np.pi * x[..., 0]) + 0.5 * np.cos(4.0 * np.pi * x[..., -1])
            direct = global_operator(field, smooth)
            via = apply_operator_via_bloch(field, smooth)
            operator_error = float(np.max(np.abs(via - direct)) / np.max(np.abs(direct)))
            report.add_check(
                Check.at_most("Bloch operator matches direct operator", operator_error, BLOCH_OPERATOR_TOL)
            )

        first = first_band_dominance(field, compact_bump, cfg.transform_eps)
        _slope_check(report, "first-band remainder rate", first.slopes["remainder"], first.column("remainder"))
        bloch_vs = bloch_vs_fourier(field, compact_bump, cfg.transform_eps, cfg.max_frequency)
        _slope_check(
            report,
            "first Bloch coefficient approaches Fourier",
            bloch_vs.slopes["error"],
            bloch_vs.column("error"),
        )
        report.results[MODE_TRANSFORM] = {
            "cells": cells,
            "resolution": field.resolution,
            "parseval_residual": decomposition.parseval_residual,
            "solve_error": solve_error,
            "operator_error": operator_error,
            "first_band": first.to_dict(),
            "bloch_vs_fourier": bloch_vs.to_dict(),
        }

    def run_converge(self) -> None:
        cfg = self.config
        report = self.report
        if cfg.dimension != 1:
            raise ConfigurationError("converge-1d needs dimension 1")
        limits = analytic_1d_limits(cfg.a_spec, cfg.b_spec, cfg.converge_factor)
        tables = {}
        for limit in (LIMIT_BSHARP, LIMIT_BSTAR):
            tables[limit] = flux_convergence(
                cfg.a_spec,
                cfg.b_spec,
                cfg.converge_factor,
                cfg.converge_eps,
                source=cfg.source,
                cell_resolution=cfg.cell_resolution,
                limit=limit,
                limits=limits,
            )
            report.add_rows(
                "convergence",
                ["limit"] + CONVERGENCE_COLUMNS + ["zSpread"],
                [{"limit": limit, **row} for row in tables[limit].rows],
            )

        sharp, control = tables[LIMIT_BSHARP], tables[LIMIT_BSTAR]
        for column in ("errSigma", "errZ"):
            _slope_check(report, f"{column} rate with Bsharp", sharp.slopes[column], sharp.column(column))
        finest_sharp = float(sharp.column("errZ")[-1])
        finest_control = float(control.column("errZ")[-1])
        report.add_check(
            Check.at_least(
                "Bstar control plateaus above Bsharp",
                finest_control,
                PLATEAU_FACTOR * finest_sharp,
                reason="no_plateau",
            )
        )
        spread = max(float(np.max(t.column("zSpread"))) for t in tables.values())
        report.add_check(Check.at_most("adjoint flux constant", spread, SPREAD_TOL))

        # Cell-solver path on the exact 1D discretization
        fd = SolverConfig(tol=cfg.solver.tol, max_iter=cfg.solver.max_iter, mode=FD_HARMONIC)
        if _sharp_piecewise(cfg.a_spec) and _sharp_piecewise(cfg.b_spec):
            field_a, field_b = self.fields
            chi = self.correctors(CHI, fd)
            cell = {
                "astar": assemble_homogenized(field_a, chi),
                "bstar": assemble_homogenized(field_b, self.correctors(ZETA, fd)),
                "bsharp": twoscale_from_correctors(field_b, chi, "t", cfg.converge_factor),
            }
            for name, tensor in cell.items():
                gap = abs(float(tensor.matrix[0, 0]) - getattr(limits, name))
                report.add_check(Check.at_most(f"{name} closed form matches cell solve", gap, ORACLE_TOL))

        report.results[MODE_CONVERGE] = {
            "limits": limits.to_dict(),
            "tables": {name: table.to_dict() for name, table in tables.items()},
        }

    # ---------------------------------------------------------------- driver

    STAGES: Dict[str, str] = {
        MODE_TENSORS: "run_tensors",
        MODE_BOUNDS: "run_bounds",
        MODE_VARIATIONAL: "run_variational",
        MODE_BLOCH: "run_bloch",
        MODE_TRANSFORM: "run_transform",
        MODE_CONVERGE: "run_converge",
    }

    def modes(self) -> List[str]:
        if self.config.mode != MODE_ALL:
            return [self.config.mode]
        modes = list(MODE_ORDER)
        cfg = self.config
        if cfg.dimension != 1 or breakpoints(cfg.a_spec) is None or breakpoints(cfg.b_spec) is None:
            logger.info("Skipping %s: needs 1D piecewise-constant profiles", MODE_CONVERGE)
            modes.remove(MODE_CONVERGE)
        return modes

    def execute(self) -> RunReport:
        for mode in self.modes():
            logger.info("Stage %s started", mode)
            start = time.perf_counter()
            getattr(self, self.STAGES[mode])()
            self.report.timings[mode] = time.perf_counter() - start
            self.report.modes.append(mode)
            logger.info("Stage %s finished in %.2fs", mode, self.report.timings[mode])
        return self.report


def _slope_check(report: RunReport, name: str, slope: float, errors: np.ndarray) -> None:
    """Rate check; errors already at round-off carry no rate and pass."""
    if float(np.max(errors)) <= SLOPE_FLOOR:
        report.add_check(Check.at_most(name + " at round-off", float(np.max(errors)), SLOPE_FLOOR))
    else:
        report.add_check(Check.at_least(name, slope, MIN_SLOPE, reason="rate_too_low"))


def _error_payload(exc: BlochHomogError) -> Dict[str, str]:
    return {"reason": exc.reason, "type": type(exc).__name__, "message": exc.message}


def run(config: RunConfig) -> Tuple[RunReport, int]:
    """Execute the requested pipelines and write the report artifacts.

    Returns:
        The report and the exit code: 0 all checks pass, 2 a check failed, 3 invalid
        configuration or input (nothing written), 4 solver failure, 5 the report
        could not be written.
    """
    pipeline = Pipeline(config)
    output_dir = config.output_dir or get_config().output.output_dir
    try:
        report = pipeline.execute()
    except CONFIG_ERRORS as exc:
        logger.error("Invalid configuration: %s", exc.message)
        pipeline.report.error = _error_payload(exc)
        return pipeline.report, EXIT_CONFIG_ERROR
    except BlochHomogError as exc:
        logger.error("Run failed (%s): %s", exc.reason, exc.message, exc_info=True)
        pipeline.report.error = _error_payload(exc)
        try:
            emit_report(pipeline.report, output_dir)
        except BlochHomogError as write_exc:
            logger.error("Could not write report: %s", write_exc.message)
        return pipeline.report, EXIT_SOLVER_ERROR

    try:
        emit_report(report, output_dir)
    except BlochHomogError as exc:
        logger.error("Could not write report: %s", exc.message)
        report.error = _error_payload(exc)
        return report, EXIT_REPORT_ERROR

    if not report.passed:
        logger.warning("%d of %d checks failed", len(report.failed_checks), len(report.checks))
        return report, EXIT_CHECK_FAILED
    logger.info("All %d checks passed", len(report.checks))
    return report, EXIT_OK
