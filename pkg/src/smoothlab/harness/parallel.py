"""Order-preserving map over a process pool."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor


def run_jobs(fn, jobs, n_workers=1):
    """Return ``[(job, result_or_exception)]`` in the order of ``jobs``.

    Exceptions raised by ``fn`` are caught and returned so that callers can flush partial
    results. Every job carries its own seed, so the worker count never changes the output.
    """
    jobs = list(jobs)
    if n_workers <= 1 or len(jobs) <= 1:
        out = []
        for job in jobs:
            try:
                out.append((job, fn(job)))
            except Exception as exc:  # noqa: BLE001 - reported in the failure manifest
                out.append((job, exc))
        return out
    with ProcessPoolExecutor(max_workers=n_workers) as pool:
        futures = [pool.submit(fn, job) for job in jobs]
        out = []
        for job, fut in zip(jobs, futures):
            exc = fut.exception()
            out.append((job, exc if exc is not None else fut.result()))
        return out
