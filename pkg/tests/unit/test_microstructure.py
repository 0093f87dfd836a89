"""
Unit tests for microstructure presets, validation and resampling.
"""

import numpy as np
import pytest

from blochhomog.exceptions import UnsupportedFactorError, ValidationError
from blochhomog.microstructure import (
    PresetSpec,
    build_field,
    cell_average,
    harmonic_average,
    resample_periodic,
    validate_ellipticity,
)


class TestPresetSpec:
    """Tests for preset parsing and validation."""

    def test_from_dict_laminate(self, laminate_a):
        assert laminate_a.kind == "laminate"
        assert laminate_a.phases == (1.0, 4.0)
        assert laminate_a.is_piecewise

    def test_unknown_kind(self):
        with pytest.raises(ValidationError):
            PresetSpec.from_dict({"kind": "voronoi"})

    def test_unknown_key(self):
        with pytest.raises(ValidationError):
            PresetSpec.from_dict({"kind": "constant", "phases": [1.0], "colour": "red"})

    def test_missing_kind(self):
        with pytest.raises(ValidationError):
            PresetSpec.from_dict({"phases": [1.0]})

    def test_laminate_needs_two_phases(self):
        with pytest.raises(ValidationError):
            PresetSpec(kind="laminate", phases=(1.0,))

    def test_fraction_range(self):
        with pytest.raises(ValidationError):
            PresetSpec(kind="laminate", phases=(1.0, 2.0), fraction=1.0)

    def test_trig_must_stay_positive(self):
        with pytest.raises(ValidationError):
            PresetSpec.from_dict(
                {"kind": "trig-smooth", "mean": 1.0, "terms": [{"amplitude": 1.5, "factors": [["sin", 1]]}]}
            )

    def test_unknown_trig_function(self):
        with pytest.raises(ValidationError):
            PresetSpec.from_dict(
                {"kind": "trig-smooth", "mean": 2.0, "terms": [{"amplitude": 1.0, "factors": [["tan", 1]]}]}
            )

    def test_to_dict_round_trip(self, smooth_a):
        again = PresetSpec.from_dict(smooth_a.to_dict())
        assert again.to_dict() == smooth_a.to_dict()

    def test_declared_bounds_violated(self):
        spec = PresetSpec(kind="laminate", phases=(1.0, 4.0), alpha=2.0)
        with pytest.raises(ValidationError):
            spec.bounds(1)


class TestBuildField:
    """Tests for sampling presets on the cell grid."""

    def test_laminate_values(self, laminate_a):
        field = build_field(laminate_a, 1, 8)
        np.testing.assert_array_equal(field.values[:, 0, 0], [1, 1, 1, 1, 4, 4, 4, 4])
        assert field.alpha == 1.0
        assert field.beta == 4.0

    def test_constant_2d_identity(self, identity):
        field = build_field(identity, 2, 8)
        assert field.values.shape == (8, 8, 2, 2)
        np.testing.assert_array_equal(field.values[3, 5], np.eye(2))

    def test_checkerboard_pattern(self):
        field = build_field(PresetSpec(kind="checkerboard", phases=(1.0, 5.0)), 2, 4)
        diag = field.values[..., 0, 0]
        assert diag[0, 0] == 1.0
        assert diag[0, 3] == 5.0
        assert diag[3, 3] == 1.0

    def test_smooth_field_positive(self, smooth_a):
        field = build_field(smooth_a, 2, 16)
        assert validate_ellipticity(field, field.alpha, field.beta).passed
        assert field.values[..., 0, 0].min() >= 1.0 - 1e-12

    def test_fields_are_immutable(self, laminate_a):
        field = build_field(laminate_a, 1, 8)
        with pytest.raises(ValueError):
            field.values[0, 0, 0] = 7.0

    def test_odd_resolution_rejected(self, laminate_a):
        with pytest.raises(ValidationError):
            build_field(laminate_a, 1, 7)

    def test_unrepresentable_fraction(self):
        spec = PresetSpec(kind="laminate", phases=(1.0, 2.0), fraction=0.3)
        with pytest.raises(ValidationError):
            build_field(spec, 1, 8)

    def test_unrepresentable_segment_inclusion(self):
        spec = PresetSpec(kind="disk-inclusion", phases=(1.0, 2.0), fraction=0.3)
        with pytest.raises(ValidationError):
            build_field(spec, 1, 8)

    def test_segment_inclusion_on_faces(self):
        spec = PresetSpec(kind="disk-inclusion", phases=(1.0, 2.0), fraction=0.5)
        field = build_field(spec, 1, 8)
        assert np.mean(field.values[:, 0, 0] == 2.0) == 0.5

    def test_disk_reports_sampled_fraction(self):
        spec = PresetSpec(kind="disk-inclusion", phases=(1.0, 2.0), fraction=0.3)
        # 4 centres per quadrant fall inside r = sqrt(0.3/π) on an 8x8 grid
        assert spec.check_representable(8, 2) == pytest.approx(0.25)
        field = build_field(spec, 2, 8)
        assert np.mean(field.values[..., 0, 0] == 2.0) == pytest.approx(0.25)

    def test_laminate_has_no_sampled_fraction(self, laminate_a):
        assert laminate_a.check_representable(16) is None

    def test_unsupported_dimension(self, identity):
        with pytest.raises(ValidationError):
            build_field(identity, 3, 8)

    def test_tabulated_csv(self, tmp_path):
        path = tmp_path / "table.csv"
        path.write_text("1.0\n2.0\n2.0\n1.0\n", encoding="utf-8")
        field = build_field(PresetSpec(kind="tabulated", path=str(path)), 1, 8)
        np.testing.assert_array_equal(field.values[:, 0, 0], [1, 1, 2, 2, 2, 2, 1, 1])


class TestValidation:
    """Tests for ellipticity checks and cell averages."""

    def test_ellipticity_failure_reported(self, laminate_a):
        field = build_field(laminate_a, 1, 8)
        report = validate_ellipticity(field, 2.0, 4.0)
        assert not report.passed
        assert not report.coercive
        assert report.bounded
        assert report.failing_points == 4

    def test_laminate_averages(self, laminate_a):
        field = build_field(laminate_a, 1, 16)
        assert cell_average(field)[0, 0] == pytest.approx(2.5)
        assert harmonic_average(field)[0, 0] == pytest.approx(1.6)


class TestResamplePeriodic:
    """Tests for g(t·y) resampling."""

    def test_integer_factor(self):
        result = resample_periodic(np.array([2.0, 2, 2, 2, 1, 1, 1, 1]), 2)
        np.testing.assert_array_equal(result, [2, 2, 1, 1, 2, 2, 1, 1])

    def test_factor_one_is_identity(self):
        values = np.arange(8.0)
        np.testing.assert_array_equal(resample_periodic(values, 1), values)

    def test_half_factor_over_two_periods(self):
        values = np.array([1.0, 1.0, 3.0, 3.0])
        result = resample_periodic(values, "1/2", periods=2)
        assert result.shape == (8,)
        np.testing.assert_allclose(result, [1, 1, 1, 1, 3, 3, 3, 3])

    def test_trailing_axes_carried(self):
        values = np.ones((8, 2, 2))
        assert resample_periodic(values, 3, dimension=1).shape == (8, 2, 2)

    def test_mean_preserved(self):
        rng = np.random.default_rng(1)
        values = rng.random(16)
        result = resample_periodic(values, "3/2", periods=2)
        assert result.mean() == pytest.approx(values.mean(), rel=1e-13)

    def test_irrational_factor_rejected(self):
        with pytest.raises(UnsupportedFactorError):
            resample_periodic(np.ones(8), np.sqrt(2.0))
