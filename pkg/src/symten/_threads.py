"""Thread cap from the SYMTEN_THREADS environment variable.

Applied when the package is imported, before numpy and jax start their
thread pools.  Variables the user has already set are left alone.
"""

from __future__ import annotations

import os

ENV = "SYMTEN_THREADS"
_POOLS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS")


def requested() -> int | None:
    """The requested thread count, or None when unset; ValueError if malformed."""
    raw = os.environ.get(ENV)
    if raw is None or raw.strip() == "":
        return None
    try:
        k = int(raw)
    except ValueError:
        raise ValueError(f"{ENV} must be a positive integer, got {raw!r}") from None
    if k < 1:
        raise ValueError(f"{ENV} must be a positive integer, got {raw!r}")
    return k


def apply() -> int | None:
    try:
        k = requested()
    except ValueError:
        return None  # reported by the command line entry point
    if k is None:
        return None
    for var in _POOLS:
        os.environ.setdefault(var, str(k))
    if "XLA_FLAGS" not in os.environ:
        os.environ["XLA_FLAGS"] = f"--xla_cpu_multi_thread_eigen={'true' if k > 1 else 'false'}"
    return k
