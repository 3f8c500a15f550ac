"""Utilities for running independent work concurrently."""

import os
import concurrent.futures

from .exceptions import ConfigError

__all__ = [
    "THREADS_ENV_VAR",
    "worker_count",
    "map_ordered",
]

#: The environment variable which caps the number of workers.
THREADS_ENV_VAR = "WEIGHTSCOPE_THREADS"

def worker_count(requested=None):
    """Gets the number of workers to use.

    Parameters
    ----------
    requested : :class:`int` or ``None``
        The number of workers asked for.

        If ``None``, then the number of CPUs is used.

    Returns
    -------
    :class:`int`
        The number of workers, at least ``1`` and at most
        the value of the ``WEIGHTSCOPE_THREADS`` environment
        variable if it is set.

    Raises
    ------
    :exc:`.ConfigError`
        If the environment variable is not a positive integer.
    """

    if requested is None:
        requested = os.cpu_count() or 1

    cap = os.environ.get(THREADS_ENV_VAR)
    if cap is not None and cap.strip() != "":
        try:
            cap = int(cap)
        except ValueError:
            raise ConfigError(f"{THREADS_ENV_VAR} must be an integer, got '{cap}'") from None

        if cap < 1:
            raise ConfigError(f"{THREADS_ENV_VAR} must be positive, got {cap}")

        requested = min(requested, cap)

    return max(1, requested)

def map_ordered(func, items, *, workers=1):
    """Applies a function to each item, possibly concurrently.

    Results are returned in the order of ``items`` regardless
    of the order in which they complete.

    Parameters
    ----------
    func : callable
        The function to apply.
    items : iterable
        The items to apply ``func`` to.
    workers : :class:`int`
        The number of threads to use. With ``1`` the
        work is done in the calling thread.

    Returns
    -------
    :class:`list`
        ``[func(item) for item in items]``.

    Examples
    --------
    >>> import weightscope
    >>> weightscope.util.map_ordered(lambda x: x * 2, [1, 2, 3], workers=2)
    [2, 4, 6]
    """

    items = list(items)

    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]

    with concurrent.futures.ThreadPoolExecutor(max_workers=min(workers, len(items))) as executor:
        return list(executor.map(func, items))
