"""Input validation helpers shared by the functional API and the estimators."""

import os

import numpy as np

THREADS_ENV = "FTNN_NUM_THREADS"


def check_tensor(x, name="x", finite=False):
    """Return ``x`` as a float64 array of shape (n1, n2, n3)."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 3:
        raise ValueError(f"{name} must be a third-order array, got ndim={x.ndim}")
    if min(x.shape) < 1:
        raise ValueError(f"{name} has an empty extent: {x.shape}")
    if finite and not np.all(np.isfinite(x)):
        from ftnn.tensor import NumericError
        raise NumericError(f"{name} contains non-finite entries")
    return x


def check_positive(value, name):
    if not value > 0:
        raise ValueError(f"{name} must be positive, got {value!r}")
    return value


def num_workers(n_jobs=None):
    """Resolve a worker count; ``None`` falls back to the ``FTNN_NUM_THREADS`` env var."""
    if n_jobs is None:
        raw = os.environ.get(THREADS_ENV, "1")
        try:
            n_jobs = int(raw)
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if n_jobs < 0:
        n_jobs = os.cpu_count() or 1
    return max(1, int(n_jobs))
