"""
Test cases for services/sweeps.py
- Normal case: ordered results serial and threaded
- Edge case: empty input, thread count from the environment
- Failure case: non-positive thread counts
"""

import threading

import pytest

from services.sweeps import ordered_map, resolve_threads


def test_ordered_map_serial():
    assert ordered_map(lambda x: x * x, [3, 1, 2], threads=1) == [9, 1, 4]


def test_ordered_map_threaded_keeps_order():
    seen = set()

    def work(x):
        seen.add(threading.get_ident())
        return -x

    points = list(range(50))
    assert ordered_map(work, points, threads=4) == [-x for x in points]
    assert len(seen) >= 1


def test_ordered_map_empty():
    assert ordered_map(lambda x: x, [], threads=3) == []


def test_ordered_map_propagates_errors():
    def fail(x):
        raise RuntimeError(f"point {x}")

    with pytest.raises(RuntimeError):
        ordered_map(fail, [1, 2], threads=2)


def test_resolve_threads_explicit():
    assert resolve_threads(5) == 5


def test_resolve_threads_from_environment(monkeypatch):
    monkeypatch.setenv("LATERAL_VDW_THREADS", "3")
    assert resolve_threads() == 3


def test_resolve_threads_default(monkeypatch):
    monkeypatch.delenv("LATERAL_VDW_THREADS", raising=False)
    assert resolve_threads() >= 1


@pytest.mark.parametrize("threads", [0, -2])
def test_resolve_threads_rejects_non_positive(threads):
    with pytest.raises(ValueError):
        resolve_threads(threads)
