import multiprocessing as mp
from typing import Any, Callable, Iterable, List

from diracflow.common.utils import get_n_threads


def sweep(fn: Callable, items: Iterable[Any], n_workers: int = None) -> List[Any]:
    """
    Map fn over independent inputs, in worker processes when allowed

    fn must be a module level function so it can be pickled.

    :param fn: Function of one argument
    :param items: Inputs, e.g. parameter values or graphs
    :param n_workers: Process count, defaults to DIRACFLOW_THREADS
    :returns: Results in input order
    """
    items = list(items)
    if n_workers is None:
        n_workers = get_n_threads()
    n_workers = min(n_workers, len(items))
    if n_workers <= 1:
        return [fn(item) for item in items]
    with mp.Pool(processes=n_workers) as pool:
        return pool.map(fn, items)
