"""Tests for scirtm.parallel module (.__init__ file)."""

import threading
import time

import pytest

from scirtm.parallel import JobOptions, configure_workers, resolve_workers, run_jobs

# ==========================================
# 辅助函数 (进程池需要顶层定义)
# ==========================================

CALLS = []
_lock = threading.Lock()


def simple_add(a, b):
    return a + b


def slow_square(x, sleep_time=0.05):
    time.sleep(sleep_time)
    return x * x


def always_fail(x):
    raise ValueError(f"Value {x} is too small!")


def counted_square(x):
    with _lock:
        CALLS.append(x)
    return x * x


class TestRunJobs:
    """Test cases for run_jobs."""

    def test_default_backend(self):
        """The asyncio executor is used unless process is set."""
        assert run_jobs(simple_add, [(1, 2), (3, 4), (5, 6)], n_jobs=2) == [3, 7, 11]

    def test_keeps_order(self):
        """The slow first job still comes back first."""
        kwargs = [{"sleep_time": 0.3}, {"sleep_time": 0.01}, {"sleep_time": 0.01}]
        results = run_jobs(slow_square, [(3,), (4,), (5,)], kwargs, n_jobs=3)
        assert results == [9, 16, 25]

    def test_process_backend(self):
        results = run_jobs(simple_add, [(i, 1) for i in range(5)], n_jobs=2, process=True)
        assert results == [1, 2, 3, 4, 5]

    def test_broadcast_kwargs(self):
        """A single kwargs dict applies to every job."""
        results = run_jobs(slow_square, [(1,), (2,)], [{"sleep_time": 0.0}])
        assert results == [1, 4]

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="must match"):
            run_jobs(simple_add, [(1, 2), (3, 4)], [{}, {}, {}])

    def test_unknown_option(self):
        with pytest.raises(TypeError):
            run_jobs(simple_add, [(1, 2)], thread=True)

    def test_failure_propagates(self):
        with pytest.raises(ValueError, match="too small"):
            run_jobs(always_fail, [(1,)])
        with pytest.raises(ValueError, match="too small"):
            run_jobs(always_fail, [(1,)], n_jobs=2, process=True)

    def test_cache_dir(self, tmp_path):
        """A second run with the same cache directory does not recompute."""
        pytest.importorskip("diskcache")
        CALLS.clear()
        first = run_jobs(counted_square, [(2,), (3,)], cache_dir=tmp_path)
        assert sorted(CALLS) == [2, 3]
        second = run_jobs(counted_square, [(2,), (3,), (4,)], cache_dir=tmp_path)
        assert first == [4, 9]
        assert second == [4, 9, 16]
        assert sorted(CALLS) == [2, 3, 4]

    def test_job_options_defaults(self):
        opts = JobOptions()
        assert opts.n_jobs == 1
        assert opts.cache_dir is None
        assert not opts.process


class TestWorkers:
    """Test cases for worker count resolution."""

    def test_explicit(self, monkeypatch):
        monkeypatch.setenv("SCIRTM_WORKERS", "3")
        assert resolve_workers(5) == 5

    def test_environment(self, monkeypatch):
        monkeypatch.setenv("SCIRTM_WORKERS", "3")
        assert resolve_workers() == 3

    def test_cpu_count(self, monkeypatch):
        monkeypatch.delenv("SCIRTM_WORKERS", raising=False)
        assert resolve_workers() >= 1

    def test_invalid(self, monkeypatch):
        monkeypatch.setenv("SCIRTM_WORKERS", "many")
        with pytest.raises(ValueError, match="integer"):
            resolve_workers()
        with pytest.raises(ValueError, match=">= 1"):
            resolve_workers(0)

    def test_configure_numba(self):
        numba = pytest.importorskip("numba")
        n = configure_workers(1)
        assert n == 1
        assert numba.get_num_threads() == 1
