"""Deterministic parallel evaluation of parameter grids"""
from __future__ import annotations

import logging
from multiprocessing import Pool
from typing import Any, Callable, Iterable, List, Sequence, Tuple, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def sweep(
    func: Callable[[T], R],
    cells: Sequence[T],
    workers: int = 1,
) -> List[R]:
    """Map `func` over `cells`, results in the order of `cells`

    With more than one worker the cells are spread over a process pool;
    the output never depends on the worker count. `func` must be picklable
    (a module-level function or a functools.partial of one).
    """
    if workers is None or workers < 1:
        raise ValueError(f"workers must be positive, got {workers}")

    if workers == 1 or len(cells) <= 1:
        return [func(cell) for cell in cells]

    processes = min(workers, len(cells))
    chunksize = max(1, len(cells) // (4 * processes))
    logger.debug(
        "Sweeping %d cells over %d processes (chunksize %d)",
        len(cells),
        processes,
        chunksize,
    )
    with Pool(processes=processes) as pool:
        return pool.map(func, cells, chunksize=chunksize)


def lexicographic_min(
    items: Iterable[Tuple[Any, ...]],
) -> Tuple[Any, ...] | None:
    """The smallest key tuple, e.g. (value, m, n); None for no items"""
    best = None
    for item in items:
        if best is None or item < best:
            best = item
    return best
