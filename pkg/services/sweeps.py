"""
Ordered point evaluation for grids and sweeps.

Points are evaluated independently, possibly on a thread pool; results
always come back in input order so serial and parallel runs emit
identical data.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from configs.config import AppConfig
from utils.logger import setup_logger

logger = setup_logger(__name__)

P = TypeVar("P")
R = TypeVar("R")


def resolve_threads(threads: Optional[int] = None) -> int:
    """
    Worker count: the explicit value, else LATERAL_VDW_THREADS.

    Raises:
        ValueError: If the explicit value is below 1.
    """
    if threads is None:
        return AppConfig().LATERAL_VDW_THREADS
    if threads < 1:
        raise ValueError(f"Thread count must be at least 1, got {threads}")
    return int(threads)


def ordered_map(
    fn: Callable[[P], R], points: Iterable[P], threads: Optional[int] = None
) -> List[R]:
    """
    Apply fn to every point and return the results in input order.

    Args:
        fn (callable): Pure function of one point.
        points (iterable): Evaluation points.
        threads (int, optional): Worker threads; config fallback when omitted.

    Returns:
        list: fn(point) for each point, in order.
    """
    points = list(points)
    workers = min(resolve_threads(threads), max(len(points), 1))
    logger.debug(f"Evaluating {len(points)} points on {workers} thread(s)")
    if workers == 1:
        return [fn(p) for p in points]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, points))
