"""
Command-line interface: run configuration, verification pipeline and report emission.

Entry point:
- bloch-homog <mode> --config <file> [--out <dir>] [--resolution n] [--tol x]
"""

from blochhomog.cli.pipeline import Pipeline, run
from blochhomog.cli.report import Check, RunReport, emit_report
from blochhomog.cli.run_config import RunConfig, load_run_config

__all__ = ["Pipeline", "run", "Check", "RunReport", "emit_report", "RunConfig", "load_run_config"]
