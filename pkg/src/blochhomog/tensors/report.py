"""
Tensor serialization: structured text blocks and long-format CSV rows.
"""

from typing import Any, Dict, List, Sequence

from blochhomog.core.models import HomogTensor

TENSOR_COLUMNS = ["provenance", "N", "n", "row", "col", "value"]


def tensor_to_text(tensor: HomogTensor) -> str:
    """Text block with provenance, N, n and one line per matrix row."""
    lines = [
        f"provenance: {tensor.provenance}",
        f"N: {tensor.dimension}",
        f"n: {tensor.resolution}",
    ]
    for i, row in enumerate(tensor.matrix):
        lines.append(f"row {i + 1}: " + " ".join(f"{value:.17g}" for value in row))
    return "\n".join(lines)


def tensors_to_text(tensors: Sequence[HomogTensor]) -> str:
    return "\n\n".join(tensor_to_text(t) for t in tensors) + "\n"


def tensor_rows(tensors: Sequence[HomogTensor]) -> List[Dict[str, Any]]:
    """One CSV block per tensor: a row per matrix entry (1-based indices)."""
    rows: List[Dict[str, Any]] = []
    for tensor in tensors:
        for i, row in enumerate(tensor.matrix):
            for j, value in enumerate(row):
                rows.append(
                    {
                        "provenance": tensor.provenance,
                        "N": tensor.dimension,
                        "n": tensor.resolution,
                        "row": i + 1,
                        "col": j + 1,
                        "value": float(value),
                    }
                )
    return rows
