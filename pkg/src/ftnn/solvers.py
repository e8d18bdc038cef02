"""ADMM solvers for F-TNN tensor completion and tensor robust PCA.

Both solvers take the mode-3 transform as a parameter: the framelet system is
the default, while the orthonormal DCT and the identity act as baselines.
Data are expected on a [0, 1] scale, since the stopping rule compares
absolute infinity-norm changes against ``tol``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ftnn._validation import check_positive, check_tensor
from ftnn.tensor import NumericError, as_mask, soft_threshold, svd, svt_slices
from ftnn.transforms import TRANSFORMS, make_transform


@dataclass(frozen=True)
class SolverConfig:
    """ADMM hyperparameters.

    ``lam`` is only read by :func:`rpca`; ``None`` there means
    ``3 / sqrt(max(n1, n2) * n3)``.  ``n_jobs=None`` defers to the
    ``FTNN_NUM_THREADS`` environment variable.
    """

    beta: float = 1.0
    tol: float = 1e-2
    max_iter: int = 100
    lam: float | None = None
    transform: str = "framelet"
    filter: str = "cubic"
    levels: int = 4
    n_jobs: int | None = None

    def __post_init__(self):
        check_positive(self.beta, "beta")
        check_positive(self.tol, "tol")
        if int(self.max_iter) < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.lam is not None:
            check_positive(self.lam, "lam")
        if self.transform not in TRANSFORMS:
            raise ValueError(f"unknown transform {self.transform!r}")

    @classmethod
    def for_completion(cls, **overrides):
        return cls(**{"beta": 1.0, "tol": 1e-2, "max_iter": 100, **overrides})

    @classmethod
    def for_rpca(cls, **overrides):
        return cls(**{"beta": 5.0, "tol": 1e-3, "max_iter": 200, **overrides})

    def build_transform(self, n3):
        return make_transform(self.transform, n3, self.filter, self.levels)


@dataclass(eq=False)
class SolveReport:
    """Outcome of a solve.

    ``trace`` has one row per iteration; its columns are named by
    ``columns`` (the first is the 1-based iteration number, the rest are
    infinity-norm changes of the tracked variables).
    """

    columns: tuple
    trace: np.ndarray
    objective: float
    converged: bool
    tol: float
    wall_time: float = 0.0

    @property
    def iterations(self):
        return len(self.trace)

    def __eq__(self, other):
        # wall time is deliberately ignored
        if not isinstance(other, SolveReport):
            return NotImplemented
        return (self.columns == other.columns and self.objective == other.objective
                and self.converged == other.converged and self.tol == other.tol
                and np.array_equal(self.trace, other.trace))


def default_lambda(shape):
    n1, n2, n3 = shape
    return 3.0 / np.sqrt(max(n1, n2) * n3)


def ftnn(x, transform):
    """Sum of nuclear norms of the transformed frontal slices."""
    xw = transform.forward(check_tensor(x))
    stack = np.moveaxis(xw, 2, 0)
    live = np.any(stack != 0, axis=(1, 2))
    if not live.any():
        return 0.0
    return float(np.linalg.svd(stack[live], compute_uv=False).sum())


def _delta(new, old):
    return float(np.max(np.abs(new - old)))


def _finish(columns, rows, objective, tol, started):
    trace = np.array(rows, dtype=np.float64).reshape(-1, len(columns))
    converged = bool(trace.size) and bool(np.all(trace[-1, 1:] <= tol))
    return SolveReport(tuple(columns), trace, float(objective), converged, tol,
                       time.perf_counter() - started)


def complete(o, mask, cfg=None, callback=None):
    """Low-rank tensor completion by F-TNN minimization.

    Parameters
    ----------
    o : array_like, shape (n1, n2, n3)
        Observation; entries off the mask are ignored.
    mask : Mask or bool array
        Observed entries.
    cfg : SolverConfig, optional
        Defaults to :meth:`SolverConfig.for_completion`.
    callback : callable, optional
        Called after every iteration with a dict holding ``iteration``,
        ``X``, ``V``, ``multiplier`` and ``svt_input``.

    Returns
    -------
    x : ndarray
        Recovered tensor; equal to ``o`` on the mask, bit for bit.
    report : SolveReport
    """
    cfg = cfg or SolverConfig.for_completion()
    started = time.perf_counter()
    o = check_tensor(o, "o")
    observed = as_mask(mask, o.shape).to_bool()
    if not np.all(np.isfinite(o[observed])):
        raise NumericError("observation has non-finite entries on the mask")
    t_op = cfg.build_transform(o.shape[2])
    beta, tau = float(cfg.beta), 1.0 / cfg.beta

    known = np.where(observed, o, 0.0)
    x = known.copy()
    xw = t_op.forward(x)
    v = xw.copy()
    lam = np.zeros_like(v)
    rows = []
    for t in range(int(cfg.max_iter)):
        arg = xw + lam / beta
        v_new = svt_slices(arg, tau, cfg.n_jobs)
        x_new = np.where(observed, known, t_op.adjoint(v_new - lam / beta))
        xw = t_op.forward(x_new)
        lam = lam + beta * (xw - v_new)
        rows.append((t + 1, _delta(v_new, v), _delta(x_new, x)))
        v, x = v_new, x_new
        if callback is not None:
            callback({"iteration": t + 1, "X": x, "V": v,
                      "multiplier": lam, "svt_input": arg})
        if rows[-1][1] <= cfg.tol and rows[-1][2] <= cfg.tol:
            break
    report = _finish(("iteration", "delta_V", "delta_X"), rows,
                     ftnn(x, t_op), cfg.tol, started)
    return x, report


def rpca(o, cfg=None, callback=None):
    """Tensor robust PCA: split ``o`` into F-TNN-low-rank ``L`` plus sparse ``E``.

    ``L`` starts at ``o``; the auxiliary variable starts at the transform of
    ``o`` and ``E`` and both multipliers at zero.  ``callback`` receives a
    dict with ``iteration``, ``L``, ``E``, ``V`` and ``svt_input``.

    Returns
    -------
    low_rank, sparse : ndarray
    report : SolveReport
    """
    cfg = cfg or SolverConfig.for_rpca()
    started = time.perf_counter()
    o = check_tensor(o, "o", finite=True)
    lam_l1 = cfg.lam if cfg.lam is not None else default_lambda(o.shape)
    t_op = cfg.build_transform(o.shape[2])
    beta, tau = float(cfg.beta), 1.0 / cfg.beta

    low = o.copy()
    sparse = np.zeros_like(o)
    lw = t_op.forward(low)
    v = lw.copy()
    mult1 = np.zeros_like(v)
    mult2 = np.zeros_like(o)
    rows = []
    for t in range(int(cfg.max_iter)):
        arg = lw + mult1 / beta
        v_new = svt_slices(arg, tau, cfg.n_jobs)
        # closed-form least squares; the 1/2 weights rely on W^T W = I
        low_new = 0.5 * t_op.adjoint(v_new - mult1 / beta) + 0.5 * (o - sparse + mult2 / beta)
        sparse_new = soft_threshold(o - low_new + mult2 / beta, lam_l1 / beta)
        lw = t_op.forward(low_new)
        mult1 = mult1 + beta * (lw - v_new)
        mult2 = mult2 + beta * (o - low_new - sparse_new)
        rows.append((t + 1, _delta(v_new, v), _delta(low_new, low), _delta(sparse_new, sparse)))
        v, low, sparse = v_new, low_new, sparse_new
        if callback is not None:
            callback({"iteration": t + 1, "L": low, "E": sparse, "V": v, "svt_input": arg})
        if max(rows[-1][1:]) <= cfg.tol:
            break
    objective = ftnn(low, t_op) + lam_l1 * float(np.abs(sparse).sum())
    report = _finish(("iteration", "delta_V", "delta_L", "delta_E"), rows,
                     objective, cfg.tol, started)
    return low, sparse, report


def objective_trace(report):
    """Header plus one row per iteration, ready for ``csv.writer``."""
    header = list(report.columns)
    body = [[int(r[0]), *(float(v) for v in r[1:])] for r in report.trace]
    return [header, *body]


def shiftdim(x, inverse=False):
    """Cyclic permutation of axes, (n1, n2, n3) -> (n2, n3, n1), or its inverse."""
    x = check_tensor(x)
    return np.transpose(x, (2, 0, 1) if inverse else (1, 2, 0)).copy()


def svt_singular_values(arg, tau):
    """Singular values the V-update must produce for ``arg``, slice by slice.

    Used to audit the prox step from a solver callback.
    """
    _, s, _ = svd(np.moveaxis(check_tensor(arg), 2, 0))
    return np.maximum(s - tau, 0.0)


__all__ = [
    "SolverConfig", "SolveReport", "complete", "rpca", "ftnn",
    "default_lambda", "objective_trace", "shiftdim", "svt_singular_values",
]
