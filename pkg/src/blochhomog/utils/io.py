"""
Report I/O helpers: deterministic JSON and CSV writers.
"""

import json
import math
from pathlib import Path
from typing import Any, Dict, List, Sequence, Union

import numpy as np
import pandas as pd

from blochhomog.exceptions import ReportError
from blochhomog.logging_config import get_logger

logger = get_logger(__name__)

PathLike = Union[str, Path]


def ensure_dir(path: PathLike) -> Path:
    """Create ``path`` (and parents) if missing."""
    target = Path(path)
    try:
        target.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ReportError(f"Cannot create output directory {target}: {exc}") from exc
    return target


def to_jsonable(value: Any) -> Any:
    """Convert numpy scalars/arrays and non-finite floats into JSON-safe values.

    NaN and infinities become ``None`` so the output is strict JSON.
    """
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, complex):
        return {"real": to_jsonable(value.real), "imag": to_jsonable(value.imag)}
    return value


def write_json(path: PathLike, payload: Dict[str, Any]) -> Path:
    """Write ``payload`` with sorted keys and a trailing newline."""
    target = Path(path)
    try:
        text = json.dumps(to_jsonable(payload), indent=2, sort_keys=True, allow_nan=False)
        target.write_text(text + "\n", encoding="utf-8")
    except (OSError, TypeError, ValueError) as exc:
        raise ReportError(f"Failed to write {target}: {exc}") from exc
    logger.debug("Wrote %s", target)
    return target


def write_rows_csv(path: PathLike, rows: List[Dict[str, Any]], columns: Sequence[str]) -> Path:
    """Write rows as CSV with a fixed column order and full float precision."""
    target = Path(path)
    frame = pd.DataFrame(rows, columns=list(columns))
    try:
        frame.to_csv(target, index=False, float_format="%.17g", lineterminator="\n")
    except OSError as exc:
        raise ReportError(f"Failed to write {target}: {exc}") from exc
    logger.debug("Wrote %s (%d rows)", target, len(frame))
    return target


def residual_history_rows(history: Sequence[float], **labels: Any) -> List[Dict[str, Any]]:
    """Rows ``iteration,residual`` for one solve, prefixed by ``labels``."""
    return [
        {**labels, "iteration": i, "residual": float(r)} for i, r in enumerate(history)
    ]
