import numpy as np
import pytest
from sklearn.base import clone

from ftnn import FTNNCompletion, FTNNRobustPCA
from ftnn.synth import add_salt_pepper, gen_mask, gen_tubal_lowrank
from ftnn.solvers import SolverConfig, complete, rpca


@pytest.fixture(scope="module")
def data():
    x = gen_tubal_lowrank(8, 8, 16, 2, seed=0)
    return x, gen_mask(8, 8, 16, 0.6, seed=1)


def test_completion_matches_functional_api(data):
    x, mask = data
    est = FTNNCompletion(levels=2, max_iter=20)
    out = est.fit_transform(x, mask)
    ref, report = complete(x, mask, SolverConfig(levels=2, max_iter=20))
    assert np.array_equal(out, ref)
    assert est.report_ == report
    assert est.n_iter_ == report.iterations


def test_completion_accepts_bool_mask(data):
    x, mask = data
    a = FTNNCompletion(levels=1, max_iter=3).fit(x, mask.to_bool()).completed_
    b = FTNNCompletion(levels=1, max_iter=3).fit(x, mask).completed_
    assert np.array_equal(a, b)


def test_clone_and_params():
    est = FTNNCompletion(beta=2.0, filter="haar")
    twin = clone(est)
    assert twin.get_params() == est.get_params()
    assert twin.get_params()["beta"] == 2.0
    assert set(FTNNRobustPCA().get_params()) >= {"beta", "lam", "tol", "shiftdim"}


def test_rpca_estimator(data):
    x, _ = data
    o, _ = add_salt_pepper(x, 0.1, seed=2)
    est = FTNNRobustPCA(levels=2, max_iter=10)
    low = est.fit_transform(o)
    ref_low, ref_sparse, _ = rpca(o, SolverConfig.for_rpca(levels=2, max_iter=10))
    assert np.array_equal(low, ref_low)
    assert np.array_equal(est.sparse_, ref_sparse)
    assert est.lambda_ == pytest.approx(3 / np.sqrt(8 * 16))


def test_rpca_shiftdim_restores_axes():
    o = np.random.default_rng(3).random((40, 6, 3))
    est = FTNNRobustPCA(levels=2, max_iter=3, shiftdim=True).fit(o)
    assert est.low_rank_.shape == est.sparse_.shape == o.shape
    assert est.lambda_ == pytest.approx(3 / np.sqrt(6 * 40))


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        FTNNRobustPCA().fit(np.zeros((4, 4)))
    with pytest.raises(ValueError):
        FTNNCompletion(beta=-1).fit(np.zeros((2, 2, 40)), np.ones((2, 2, 40), bool))
