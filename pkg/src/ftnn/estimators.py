"""scikit-learn style wrappers around the ADMM solvers."""

from sklearn.base import BaseEstimator

from ftnn._validation import check_tensor
from ftnn.framelet import FrameletTransform
from ftnn.solvers import SolverConfig, complete, default_lambda, rpca, shiftdim
from ftnn.tensor import as_mask


class FTNNCompletion(BaseEstimator):
    """Fill in missing entries of a third-order tensor by F-TNN minimization.

    Parameters
    ----------
    beta : float
        Augmented Lagrangian penalty.
    tol : float
        Stop once the infinity-norm changes of both tracked variables are
        below this value.
    max_iter : int
    transform : {"framelet", "dct", "identity"}
    filter : {"cubic", "linear", "haar"}
        Framelet filter bank; ignored by the other transforms.
    levels : int
        Framelet decomposition levels.
    n_jobs : int, optional
        Worker threads for the slice-wise SVT.  Results do not depend on it.

    Attributes
    ----------
    completed_ : ndarray
    report_ : SolveReport
    n_iter_ : int

    Examples
    --------
    >>> from ftnn.synth import gen_tubal_lowrank, gen_mask
    >>> x = gen_tubal_lowrank(10, 10, 20, 1, seed=0)
    >>> m = gen_mask(10, 10, 20, 0.5, seed=1)
    >>> est = FTNNCompletion(levels=1, max_iter=5).fit(x, m)
    >>> est.completed_.shape
    (10, 10, 20)
    """

    def __init__(self, beta=1.0, tol=1e-2, max_iter=100, transform="framelet",
                 filter="cubic", levels=4, n_jobs=None):
        self.beta = beta
        self.tol = tol
        self.max_iter = max_iter
        self.transform = transform
        self.filter = filter
        self.levels = levels
        self.n_jobs = n_jobs

    def _config(self):
        return SolverConfig(beta=self.beta, tol=self.tol, max_iter=self.max_iter,
                            transform=self.transform, filter=self.filter,
                            levels=self.levels, n_jobs=self.n_jobs)

    def fit(self, X, mask):
        X = check_tensor(X, "X")
        mask = as_mask(mask, X.shape)
        self.completed_, self.report_ = complete(X, mask, self._config())
        self.n_iter_ = self.report_.iterations
        return self

    def fit_transform(self, X, mask):
        return self.fit(X, mask).completed_


class FTNNRobustPCA(BaseEstimator):
    """Split a tensor into an F-TNN-low-rank part and a sparse part.

    ``lam=None`` resolves to ``3 / sqrt(max(n1, n2) * n3)`` on the extents
    the solver sees.  With ``shiftdim=True`` the axes are rotated
    (n1, n2, n3) -> (n2, n3, n1) before solving and rotated back afterwards,
    which helps when the third extent is too short for the framelet levels.
    """

    def __init__(self, beta=5.0, lam=None, tol=1e-3, max_iter=200,
                 transform="framelet", filter="cubic", levels=4,
                 shiftdim=False, n_jobs=None):
        self.beta = beta
        self.lam = lam
        self.tol = tol
        self.max_iter = max_iter
        self.transform = transform
        self.filter = filter
        self.levels = levels
        self.shiftdim = shiftdim
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        X = check_tensor(X, "X", finite=True)
        work = shiftdim(X) if self.shiftdim else X
        self.lambda_ = self.lam if self.lam is not None else default_lambda(work.shape)
        cfg = SolverConfig(beta=self.beta, lam=self.lambda_, tol=self.tol,
                           max_iter=self.max_iter, transform=self.transform,
                           filter=self.filter, levels=self.levels, n_jobs=self.n_jobs)
        low, sparse, self.report_ = rpca(work, cfg)
        if self.shiftdim:
            low, sparse = shiftdim(low, inverse=True), shiftdim(sparse, inverse=True)
        self.low_rank_, self.sparse_ = low, sparse
        self.n_iter_ = self.report_.iterations
        return self

    def fit_transform(self, X, y=None):
        return self.fit(X).low_rank_


__all__ = ["FTNNCompletion", "FTNNRobustPCA", "FrameletTransform"]
