import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ftnn.tensor import (
    Mask, NumericError, ShapeError, fold3, identity_tensor, mode3_product, norms,
    project_mask, soft_threshold, svd, svt, svt_slices, tprod, unfold3,
)

from conftest import rel

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
shapes3 = st.tuples(*[st.integers(1, 5)] * 3)


def tensors(shape=shapes3):
    return shape.flatmap(lambda s: arrays(np.float64, s, elements=finite))


class TestUnfoldFold:
    def test_documented_entry(self):
        x = np.zeros((4, 3, 2))
        x[1, 2, 0] = 7.5  # (2,3,1) one-based
        m = unfold3(x)
        assert m.shape == (2, 12)
        # l = (j-1)*n1 + i = 2*4 + 2 = 10 one-based
        assert m[0, 9] == 7.5
        assert np.count_nonzero(m) == 1

    def test_zero(self):
        assert np.array_equal(unfold3(np.zeros((2, 3, 4))), np.zeros((4, 6)))

    def test_single_entry(self):
        assert fold3(np.array([[2.5]]), 1, 1).shape == (1, 1, 1)
        assert fold3(np.array([[2.5]]), 1, 1)[0, 0, 0] == 2.5

    def test_index_arithmetic_oracle(self, rng):
        for _ in range(100):
            n1, n2, n3 = rng.integers(1, 6, size=3)
            x = rng.standard_normal((n1, n2, n3))
            m = unfold3(x)
            oracle = np.empty((n3, n1 * n2))
            for i in range(n1):
                for j in range(n2):
                    for k in range(n3):
                        oracle[k, j * n1 + i] = x[i, j, k]
            assert np.array_equal(m, oracle)
            assert np.max(np.abs(fold3(m, n1, n2) - x)) == 0

    def test_fold_shape_error(self):
        with pytest.raises(ShapeError):
            fold3(np.zeros((2, 5)), 2, 3)

    @given(tensors())
    def test_round_trips_exact(self, x):
        n1, n2, _ = x.shape
        assert np.array_equal(fold3(unfold3(x), n1, n2), x)
        m = unfold3(x)
        assert np.array_equal(unfold3(fold3(m, n1, n2)), m)


class TestMode3Product:
    def test_identity(self, rng):
        x = rng.standard_normal((3, 4, 5))
        assert np.allclose(mode3_product(x, np.eye(5)), x, rtol=0, atol=0)

    def test_ones_row_sums_slices(self, rng):
        x = rng.standard_normal((3, 4, 5))
        y = mode3_product(x, np.ones((1, 5)))
        assert y.shape == (3, 4, 1)
        assert np.allclose(y[:, :, 0], x.sum(axis=2), atol=1e-13)

    def test_triple_loop_oracle(self, rng):
        x = rng.standard_normal((2, 2, 3))
        a = rng.standard_normal((4, 3))
        oracle = np.zeros((2, 2, 4))
        for i in range(2):
            for j in range(2):
                for k in range(4):
                    oracle[i, j, k] = sum(x[i, j, n] * a[k, n] for n in range(3))
        assert np.allclose(mode3_product(x, a), oracle, rtol=1e-14, atol=1e-14)

    def test_shape_error(self):
        with pytest.raises(ShapeError):
            mode3_product(np.zeros((2, 2, 3)), np.zeros((2, 4)))

    def test_composition(self, rng):
        x = rng.standard_normal((3, 4, 6))
        a = rng.standard_normal((5, 7))
        b = rng.standard_normal((7, 6))
        lhs = mode3_product(x, a @ b)
        rhs = mode3_product(mode3_product(x, b), a)
        assert rel(lhs, rhs) < 1e-12


def tprod_oracle(a, b):
    n1, n2, n3 = a.shape
    n4 = b.shape[1]
    out = np.zeros((n1, n4, n3))
    for i in range(n1):
        for j in range(n4):
            for t in range(n3):
                out[i, j, t] = sum(a[i, k, s] * b[k, j, (t - s) % n3]
                                   for k in range(n2) for s in range(n3))
    return out


class TestTprod:
    def test_identity(self, rng):
        a = rng.standard_normal((3, 4, 5))
        assert np.array_equal(tprod(a, identity_tensor(4, 5)), a)
        assert np.array_equal(tprod(identity_tensor(3, 5), a), a)

    def test_matrix_product_when_n3_is_one(self, rng):
        a = rng.standard_normal((3, 4, 1))
        b = rng.standard_normal((4, 2, 1))
        assert np.allclose(tprod(a, b)[:, :, 0], a[:, :, 0] @ b[:, :, 0], atol=1e-14)

    def test_convolution_oracle(self, rng):
        a = rng.standard_normal((2, 3, 4))
        b = rng.standard_normal((3, 2, 4))
        assert np.allclose(tprod(a, b), tprod_oracle(a, b), rtol=1e-13, atol=1e-13)

    def test_associative(self, rng):
        a = rng.standard_normal((2, 3, 4))
        b = rng.standard_normal((3, 3, 4))
        c = rng.standard_normal((3, 2, 4))
        assert rel(tprod(tprod(a, b), c), tprod(a, tprod(b, c))) < 1e-10

    def test_shape_error(self):
        with pytest.raises(ShapeError):
            tprod(np.zeros((2, 3, 4)), np.zeros((2, 2, 4)))


class TestMask:
    def test_full_and_empty(self, rng):
        x = rng.standard_normal((3, 4, 2))
        assert np.array_equal(project_mask(x, Mask.full(x.shape)), x)
        assert not np.any(project_mask(x, Mask(x.shape, [])))

    def test_partition(self, rng):
        x = rng.standard_normal((3, 4, 2))
        m = Mask.from_bool(rng.random(x.shape) < 0.4)
        total = project_mask(x, m) + project_mask(x, m, complement=True)
        assert np.array_equal(total, x)

    def test_offsets_follow_tensor_order(self):
        m = Mask((2, 3, 2), [1, 7])
        b = m.to_bool()
        assert b[1, 0, 0] and b[1, 0, 1]
        assert b.sum() == 2
        assert m.sampling_rate == 2 / 12

    @pytest.mark.parametrize("idx", [[3, 3], [5, 2], [12], [-1]])
    def test_rejects_bad_offsets(self, idx):
        with pytest.raises(ValueError):
            Mask((2, 3, 2), idx)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            project_mask(np.zeros((2, 2, 2)), Mask((2, 2, 3), []))


def prox_objective(y, m, tau):
    return tau * np.linalg.svd(y, compute_uv=False).sum() + 0.5 * np.sum((y - m) ** 2)


class TestSVT:
    def test_diagonal(self):
        out = svt(np.diag([3.0, 1.0]), 2.0)
        assert np.allclose(out, np.diag([1.0, 0.0]), atol=1e-15)

    def test_zero_tau(self, rng):
        m = rng.standard_normal((6, 4))
        assert np.linalg.norm(svt(m, 0.0) - m) <= 1e-10 * np.linalg.norm(m)

    def test_random_probe_minimality(self, rng):
        m = rng.standard_normal((5, 4))
        tau = 0.3
        y = svt(m, tau)
        best = prox_objective(y, m, tau)
        for _ in range(1000):
            probe = y + rng.standard_normal(y.shape) * 10.0 ** rng.uniform(-4, 0)
            assert best <= prox_objective(probe, m, tau) + 1e-12

    def test_singular_values_shrunk(self, rng):
        m = rng.standard_normal((7, 5))
        s = np.linalg.svd(m, compute_uv=False)
        out = np.linalg.svd(svt(m, 0.8), compute_uv=False)
        assert np.allclose(out, np.maximum(s - 0.8, 0), atol=1e-9)

    def test_non_finite(self):
        with pytest.raises(NumericError):
            svt(np.array([[np.nan, 0.0]]), 1.0)

    def test_negative_tau(self):
        with pytest.raises(ValueError):
            svt(np.eye(2), -1.0)

    def test_zero_matrix_short_circuit(self):
        assert np.array_equal(svt(np.zeros((3, 3)), 0.5), np.zeros((3, 3)))

    @settings(max_examples=50)
    @given(st.integers(0, 2**32 - 1), st.floats(0, 3))
    def test_non_expansive(self, seed, tau):
        g = np.random.default_rng(seed)
        a, b = g.standard_normal((2, 6, 4))
        lhs = np.linalg.norm(svt(a, tau) - svt(b, tau))
        assert lhs <= np.linalg.norm(a - b) + 1e-10

    def test_sign_convention(self, rng):
        u, s, vt = svd(rng.standard_normal((6, 4)))
        pick = np.argmax(np.abs(u), axis=0)
        assert np.all(u[pick, np.arange(4)] >= 0)

    def test_slices_match_single_and_workers(self, rng):
        x = rng.standard_normal((5, 4, 9))
        x[:, :, 3] = 0.0
        one = svt_slices(x, 0.7, n_jobs=1)
        for k in range(9):
            assert np.array_equal(one[:, :, k], svt(x[:, :, k], 0.7))
        assert np.array_equal(one, svt_slices(x, 0.7, n_jobs=4))


class TestSoftThreshold:
    @pytest.mark.parametrize("value,expected", [(1.2, 0.7), (-0.3, 0.0), (-2.0, -1.5), (0.5, 0.0)])
    def test_formula(self, value, expected):
        assert soft_threshold(np.array([value]), 0.5)[0] == pytest.approx(expected, abs=1e-15)

    @given(tensors())
    def test_zero_tau_identity(self, x):
        assert np.array_equal(soft_threshold(x, 0.0), x)

    @given(tensors(), st.floats(0, 10))
    def test_matches_closed_form(self, x, tau):
        expected = np.sign(x) * np.maximum(np.abs(x) - tau, 0)
        assert np.array_equal(soft_threshold(x, tau), expected)


class TestNorms:
    def test_zero(self):
        assert norms(np.zeros((2, 2, 2))) == (0.0, 0.0, 0.0)

    def test_single(self):
        x = np.zeros((2, 3, 2))
        x[1, 1, 1] = 2.0
        assert norms(x) == (2.0, 2.0, 2.0)

    def test_ones(self):
        n = norms(np.ones((2, 2, 2)))
        assert n.fro == pytest.approx(np.sqrt(8))
        assert n.l1 == 8.0 and n.linf == 1.0
