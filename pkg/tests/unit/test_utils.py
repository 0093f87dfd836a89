"""
Unit tests for rational factors, grid helpers, parallel map and report I/O.
"""

import json
from fractions import Fraction

import numpy as np
import pytest

from blochhomog.exceptions import UnsupportedFactorError
from blochhomog.utils.grid import cell_centers, loglog_slope, tile_periods
from blochhomog.utils.io import to_jsonable, write_json, write_rows_csv
from blochhomog.utils.parallel import parallel_map
from blochhomog.utils.rational import as_fraction, parse_eps


class TestAsFraction:
    """Tests for as_fraction function."""

    def test_string(self):
        assert as_fraction("3/2") == Fraction(3, 2)

    def test_float(self):
        assert as_fraction(0.25) == Fraction(1, 4)

    def test_int(self):
        assert as_fraction(2) == Fraction(2)

    def test_fraction_passthrough(self):
        assert as_fraction(Fraction(5, 7)) == Fraction(5, 7)

    def test_irrational(self):
        with pytest.raises(UnsupportedFactorError):
            as_fraction(np.pi)

    def test_non_positive(self):
        with pytest.raises(UnsupportedFactorError):
            as_fraction("-1/2")
        with pytest.raises(UnsupportedFactorError):
            as_fraction(0)

    def test_large_denominator(self):
        with pytest.raises(UnsupportedFactorError):
            as_fraction("1/65")

    def test_bool_rejected(self):
        with pytest.raises(UnsupportedFactorError):
            as_fraction(True)

    def test_garbage(self):
        with pytest.raises(UnsupportedFactorError):
            as_fraction("two")


class TestParseEps:
    """Tests for parse_eps function."""

    def test_fraction_string(self):
        assert parse_eps("1/128") == Fraction(1, 128)

    def test_cell_count(self):
        assert parse_eps(16) == Fraction(1, 16)

    def test_decimal(self):
        assert parse_eps(0.125) == Fraction(1, 8)

    def test_not_unit_fraction(self):
        with pytest.raises(UnsupportedFactorError):
            parse_eps("3/8")


class TestGridHelpers:
    """Tests for cell centres, tiling and slope fitting."""

    def test_cell_centers_1d(self):
        np.testing.assert_allclose(cell_centers(4, 1)[:, 0], [0.125, 0.375, 0.625, 0.875])

    def test_cell_centers_2d_shape(self):
        points = cell_centers(4, 2)
        assert points.shape == (4, 4, 2)
        np.testing.assert_allclose(points[1, 2], [0.375, 0.625])

    def test_tile_keeps_trailing_axes(self):
        values = np.arange(4.0).reshape(2, 2)
        tiled = tile_periods(values[:, None, :], 3, 1)
        assert tiled.shape == (6, 1, 2)

    def test_slope_linear(self):
        eps = np.array([1 / 8, 1 / 16, 1 / 32, 1 / 64])
        assert loglog_slope(eps, 3.0 * eps) == pytest.approx(1.0)

    def test_slope_quadratic(self):
        eps = np.array([1 / 8, 1 / 16, 1 / 32])
        assert loglog_slope(eps, eps**2) == pytest.approx(2.0)

    def test_slope_at_floor_is_nan(self):
        assert np.isnan(loglog_slope(np.array([0.5, 0.25]), np.array([1e-15, 1e-16])))


class TestParallelMap:
    """Tests for parallel_map function."""

    def test_serial_preserves_order(self):
        assert parallel_map(lambda x: x * x, range(5)) == [0, 1, 4, 9, 16]

    def test_threads_preserve_order(self):
        assert parallel_map(lambda x: -x, range(10), threads=3) == [-x for x in range(10)]

    def test_empty(self):
        assert parallel_map(lambda x: x, []) == []


class TestReportIO:
    """Tests for deterministic JSON and CSV writers."""

    def test_jsonable_numpy(self):
        payload = to_jsonable({"a": np.float64(1.5), "b": np.arange(3), "c": np.bool_(True)})
        assert payload == {"a": 1.5, "b": [0, 1, 2], "c": True}

    def test_jsonable_non_finite(self):
        assert to_jsonable([np.nan, np.inf, 1.0]) == [None, None, 1.0]

    def test_json_sorted_and_stable(self, tmp_path):
        first = write_json(tmp_path / "a.json", {"z": 1, "a": [1.0, 2.0]}).read_text()
        second = write_json(tmp_path / "b.json", {"a": [1.0, 2.0], "z": 1}).read_text()
        assert first == second
        assert list(json.loads(first)) == ["a", "z"]

    def test_csv_column_order(self, tmp_path):
        path = write_rows_csv(tmp_path / "t.csv", [{"b": 2, "a": 1}], ["a", "b"])
        assert path.read_text().splitlines() == ["a,b", "1,2"]

    def test_csv_full_precision(self, tmp_path):
        path = write_rows_csv(tmp_path / "t.csv", [{"x": 1.0 / 3.0}], ["x"])
        assert float(path.read_text().splitlines()[1]) == 1.0 / 3.0
