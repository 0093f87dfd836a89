"""
Run report: pass/fail checks, result tables and artifact emission.
"""

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

from blochhomog.core.constants import REPORT_FILES, SCHEMA_VERSION
from blochhomog.logging_config import get_logger
from blochhomog.utils.io import ensure_dir, write_json, write_rows_csv

logger = get_logger(__name__)

# Tables emitted as CSV, with their fixed column order when rows exist.
CSV_TABLES = ("tensors", "dispersion", "convergence", "residuals")


@dataclass
class Check:
    """One invariant or acceptance check."""

    name: str
    passed: bool
    value: Optional[float] = None
    threshold: Optional[float] = None
    reason: str = ""

    @classmethod
    def at_most(cls, name: str, value: float, threshold: float, reason: str = "") -> "Check":
        """Pass when ``value`` is finite and does not exceed ``threshold``."""
        value = float(value)
        passed = math.isfinite(value) and value <= threshold
        return cls(name, passed, value, threshold, "" if passed else reason or "exceeds_threshold")

    @classmethod
    def at_least(cls, name: str, value: float, threshold: float, reason: str = "") -> "Check":
        value = float(value)
        passed = math.isfinite(value) and value >= threshold
        return cls(name, passed, value, threshold, "" if passed else reason or "below_threshold")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "value": self.value,
            "threshold": self.threshold,
            "reason": self.reason,
        }


@dataclass
class Table:
    columns: List[str]
    rows: List[Dict[str, Any]] = field(default_factory=list)


@dataclass
class RunReport:
    """Everything a run produced.

    ``results`` maps mode name to its JSON-ready payload; ``timings`` holds wall-clock
    seconds per stage and is written separately so report.json stays byte-identical
    across reruns.
    """

    config: Dict[str, Any]
    modes: List[str] = field(default_factory=list)
    results: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    checks: List[Check] = field(default_factory=list)
    tables: Dict[str, Table] = field(default_factory=dict)
    timings: Dict[str, float] = field(default_factory=dict)
    error: Optional[Dict[str, str]] = None
    schema_version: str = SCHEMA_VERSION

    @property
    def passed(self) -> bool:
        return self.error is None and all(check.passed for check in self.checks)

    @property
    def failed_checks(self) -> List[Check]:
        return [check for check in self.checks if not check.passed]

    def add_check(self, check: Check) -> Check:
        if not check.passed:
            logger.warning("Check failed: %s (value=%s, threshold=%s)", check.name, check.value, check.threshold)
        self.checks.append(check)
        return check

    def add_rows(self, table: str, columns: List[str], rows: List[Dict[str, Any]]) -> None:
        """Append rows to a CSV table; the first caller fixes the column order."""
        target = self.tables.setdefault(table, Table(columns=list(columns)))
        for column in columns:
            if column not in target.columns:
                target.columns.append(column)
        target.rows.extend(rows)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": self.schema_version,
            "config": self.config,
            "modes": list(self.modes),
            "results": self.results,
            "checks": [check.to_dict() for check in self.checks],
            "passed": self.passed,
            "error": self.error,
        }


def emit_report(report: RunReport, directory: Path) -> List[Path]:
    """Write report.json and the non-empty CSV tables into ``directory``.

    Returns:
        Paths written, report.json first.

    Raises:
        ReportError: Directory or files cannot be written.
    """
    target = ensure_dir(directory)
    written = [write_json(target / REPORT_FILES["report"], report.to_dict())]
    for name in CSV_TABLES:
        table = report.tables.get(name)
        if table is not None and table.rows:
            written.append(write_rows_csv(target / REPORT_FILES[name], table.rows, table.columns))
    if report.timings:
        written.append(write_json(target / REPORT_FILES["timings"], report.timings))
    logger.info("Report written to %s (%d files)", target, len(written))
    return written
