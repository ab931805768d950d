import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

from django.conf import settings

T = TypeVar("T")
R = TypeVar("R")


def fmt_float(value: float) -> str:
    """
    Lossless text form of a float: 17 significant digits, with ``.0``
    appended to integral values so they still read as floats.
    """
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    text = format(value, ".17g")
    if text.lstrip("-").isdigit():
        text += ".0"
    return text


def fmt_vector(values: Iterable[float]) -> str:
    return "(" + ",".join(fmt_float(v) for v in values) + ")"


def worker_count(jobs: int | None = None) -> int:
    """Thread cap from ``DISKLAB_THREADS``, never more than the jobs."""
    cap = max(1, int(getattr(settings, "DISKLAB_THREADS", 1)))
    if jobs is not None:
        cap = min(cap, max(1, jobs))
    return cap


def parallel_map(func: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """
    Map ``func`` over ``items`` on a capped thread pool.

    Results keep the order of ``items`` whatever the schedule.
    """
    items = list(items)
    workers = worker_count(len(items))
    if workers == 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))
