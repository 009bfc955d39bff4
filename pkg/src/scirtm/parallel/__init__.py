"""
Independent-job execution for sweeps, bisection steps and lobe fits.

Jobs run on a process pool, or in-process on the asyncio default executor.
Results can be memoized in a diskcache directory so that an interrupted
sweep resumes where it stopped.
"""

import asyncio
import concurrent.futures
import dataclasses
import logging
import os
import pickle
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple, TypeVar, Union

logger = logging.getLogger(__name__)

T = TypeVar("T")

# 缓存未命中的哨兵对象
_MISSING = object()

WORKERS_ENV = "SCIRTM_WORKERS"
CACHE_DIR_ENV = "SCIRTM_CACHE_DIR"


@dataclasses.dataclass
class JobOptions:
    n_jobs: int = 1
    with_tqdm: bool = False
    cache_dir: Optional[Union[str, os.PathLike]] = None
    process: bool = False
    description: Optional[str] = None


def resolve_workers(n: Optional[int] = None) -> int:
    """Worker count from the argument, then SCIRTM_WORKERS, then the CPU count."""
    if n is None:
        env = os.environ.get(WORKERS_ENV)
        if env:
            try:
                n = int(env)
            except ValueError:
                raise ValueError(f"{WORKERS_ENV} must be an integer, got {env!r}")
    if n is None:
        n = os.cpu_count() or 1
    n = int(n)
    if n < 1:
        raise ValueError(f"worker count must be >= 1, got {n}")
    return n


def configure_workers(n: Optional[int] = None) -> int:
    """
    Resolves the worker count and applies it to numba's thread pool.

    Returns:
        int: The worker count in effect.
    """
    import numba

    n = min(resolve_workers(n), numba.config.NUMBA_NUM_THREADS)
    numba.set_num_threads(n)
    logger.debug(f"numba thread pool set to {n} threads")
    return n


def _cache_key(task: Callable, args: tuple, kwargs: dict) -> Optional[bytes]:
    """缓存 Key：任务的限定名加参数的 pickle"""
    try:
        return pickle.dumps((f"{task.__module__}.{task.__qualname__}", args, kwargs))
    except (pickle.PicklingError, AttributeError, TypeError):
        logger.debug(f"arguments of {task} cannot be pickled; not cached")
        return None


def _exec_cached(
    task: Callable[..., T],
    args: Tuple[Any, ...],
    kwargs: Dict[str, Any],
    cache_dir: Optional[str],
) -> T:
    """每个调用自行打开缓存，进程池下也安全"""
    key = _cache_key(task, args, kwargs) if cache_dir is not None else None
    if key is None:
        return task(*args, **kwargs)

    import diskcache

    with diskcache.Cache(cache_dir, size_limit=int(1e9)) as cache:
        result = cache.get(key, default=_MISSING)
        if result is not _MISSING:
            logger.debug(f"cache hit for {task.__name__}{args}")
            return result
        result = task(*args, **kwargs)
        cache.set(key, result)
        return result


def _normalize_jobs(
    args_list: Optional[Sequence[Sequence[Any]]],
    kwargs_list: Optional[Sequence[Dict[str, Any]]],
) -> Tuple[List[tuple], List[dict]]:
    """args 与 kwargs 对齐；长度为 1 的一侧会被广播"""
    safe_args = [tuple(a) for a in args_list] if args_list is not None else [()]
    safe_kwargs = [dict(k) for k in kwargs_list] if kwargs_list is not None else [{}]
    n_args, n_kwargs = len(safe_args), len(safe_kwargs)
    count = max(n_args, n_kwargs)
    if n_args != count and n_args != 1 or n_kwargs != count and n_kwargs != 1:
        raise ValueError(
            f"args_list length ({n_args}) must match kwargs_list length ({n_kwargs})"
        )
    if n_args != count:
        safe_args = safe_args * count
    if n_kwargs != count:
        safe_kwargs = safe_kwargs * count
    return safe_args, safe_kwargs


def _progress(iterable: Iterable, total: int, options: JobOptions) -> Iterable:
    if not options.with_tqdm:
        return iterable
    from tqdm import tqdm

    return tqdm(iterable, total=total, desc=options.description)


def run_jobs(
    task: Callable[..., T],
    args_list: Optional[Sequence[Sequence[Any]]] = None,
    kwargs_list: Optional[Sequence[Dict[str, Any]]] = None,
    **options,
) -> List[T]:
    """
    Runs ``task`` once per argument set and returns the results in input order.

    Args:
        task: A picklable callable when ``process=True``.
        args_list: Positional arguments of each job.
        kwargs_list: Keyword arguments of each job.
        **options: Fields of :class:`JobOptions`.
    Returns:
        list: One result per job, in the order of ``args_list``.
    """
    opts = JobOptions(**options)
    safe_args, safe_kwargs = _normalize_jobs(args_list, kwargs_list)
    count = len(safe_args)
    cache_dir = os.fspath(opts.cache_dir) if opts.cache_dir is not None else None
    results: List[Any] = [None] * count
    logger.info(f"running {count} jobs of {getattr(task, '__name__', task)} with n_jobs={opts.n_jobs}")

    if opts.process:
        with concurrent.futures.ProcessPoolExecutor(max_workers=opts.n_jobs) as executor:
            future_to_index = {
                executor.submit(_exec_cached, task, safe_args[i], safe_kwargs[i], cache_dir): i
                for i in range(count)
            }
            for future in _progress(
                concurrent.futures.as_completed(future_to_index), count, opts
            ):
                results[future_to_index[future]] = future.result()
        return results

    # asyncio 模式：在默认线程池中运行同步任务
    async def run_in_loop():
        loop = asyncio.get_running_loop()
        sem = asyncio.Semaphore(opts.n_jobs)

        async def sem_task(index):
            async with sem:
                res = await loop.run_in_executor(
                    None, _exec_cached, task, safe_args[index], safe_kwargs[index], cache_dir
                )
                return index, res

        coros = [sem_task(i) for i in range(count)]
        for coro in _progress(asyncio.as_completed(coros), count, opts):
            idx, res = await coro
            results[idx] = res
        return results

    return asyncio.run(run_in_loop())
