"""
Parallel map over independent solves, capped by BLOCH_HOMOG_THREADS.
"""

from typing import Callable, Iterable, List, Optional, TypeVar

from joblib import Parallel, delayed

from blochhomog.config import get_config

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(func: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> List[R]:
    """Apply ``func`` to every item, preserving order.

    Runs in-process when the cap is 1; otherwise uses joblib's threading backend
    (numpy FFTs and LAPACK release the GIL).
    """
    items = list(items)
    n_jobs = threads if threads is not None else get_config().parallel.threads
    n_jobs = max(1, min(n_jobs, len(items) or 1))
    if n_jobs == 1:
        return [func(item) for item in items]
    return Parallel(n_jobs=n_jobs, prefer="threads")(delayed(func)(item) for item in items)
