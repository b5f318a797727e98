import numpy as np
import pytest

from framecmd import autodiff as ad
from framecmd import layers as L
from framecmd.gradcheck import grad_check

from oracles import (attention_oracle, bilstm_oracle, highway_oracle,
                     lstm_cell_oracle)


def random_cell(rng, input_dim, hidden_dim, prefix="cell"):
    cell = L.LstmCellParams(prefix, input_dim, hidden_dim, seed=0)
    for p in cell.parameters():
        p.data = rng.normal(0, 0.5, p.data.shape)
    return cell


def cell_dicts(cell):
    W = {g: cell.W[g].data.tolist() for g in L.GATES}
    U = {g: cell.U[g].data.tolist() for g in L.GATES}
    b = {g: cell.b[g].data.tolist() for g in L.GATES}
    return W, U, b


class TestLstmCell:
    def test_all_zero(self):
        cell = L.LstmCellParams("c", 2, 3, seed=0)
        for p in cell.parameters():
            p.data = np.zeros_like(p.data)
        h, c = L.lstm_cell_forward(ad.constant([0.0, 0.0]),
                                   ad.constant(np.zeros(3)),
                                   ad.constant(np.zeros(3)), cell)
        np.testing.assert_array_equal(h.data, np.zeros(3))
        np.testing.assert_array_equal(c.data, np.zeros(3))

    def test_carry_half(self):
        # zero weights/biases, c=1: c' = 0.5, h' = 0.5*tanh(0.5)
        cell = L.LstmCellParams("c", 1, 1, seed=0)
        for p in cell.parameters():
            p.data = np.zeros_like(p.data)
        h, c = L.lstm_cell_forward(ad.constant([0.0]), ad.constant([0.0]),
                                   ad.constant([1.0]), cell)
        np.testing.assert_allclose(c.data, [0.5], atol=1e-12)
        np.testing.assert_allclose(h.data, [0.5 * np.tanh(0.5)], atol=1e-12)
        np.testing.assert_allclose(h.data, [0.231059], atol=1e-6)

    def test_matches_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            cell = random_cell(rng, 3, 4)
            x = rng.normal(size=3)
            h0 = rng.normal(size=4)
            c0 = rng.normal(size=4)
            h, c = L.lstm_cell_forward(ad.constant(x), ad.constant(h0),
                                       ad.constant(c0), cell)
            eh, ec = lstm_cell_oracle(x.tolist(), h0.tolist(), c0.tolist(),
                                      *cell_dicts(cell))
            np.testing.assert_allclose(h.data, eh, atol=1e-10)
            np.testing.assert_allclose(c.data, ec, atol=1e-10)

    def test_dimension_mismatch(self):
        cell = L.LstmCellParams("c", 3, 4, seed=0)
        with pytest.raises(ValueError):
            L.lstm_cell_forward(ad.constant([1.0]), ad.constant(np.zeros(4)),
                                ad.constant(np.zeros(4)), cell)


class TestBilstm:
    def test_t1_is_concat_of_single_steps(self):
        rng = np.random.default_rng(8)
        fwd = random_cell(rng, 3, 2, "f")
        bwd = random_cell(rng, 3, 2, "b")
        x = rng.normal(size=3)
        states, _, _ = L.bilstm_forward([ad.constant(x)], fwd, bwd)
        zero = ad.constant(np.zeros(2))
        hf, _ = L.lstm_cell_forward(ad.constant(x), zero, zero, fwd)
        hb, _ = L.lstm_cell_forward(ad.constant(x), zero, zero, bwd)
        np.testing.assert_allclose(states[0].data,
                                   np.concatenate([hf.data, hb.data]),
                                   atol=1e-14)

    def test_palindrome_symmetry(self):
        rng = np.random.default_rng(9)
        cell = random_cell(rng, 3, 2, "s")
        a, b = rng.normal(size=3), rng.normal(size=3)
        seq = [ad.constant(v) for v in (a, b, a)]
        states, _, _ = L.bilstm_forward(seq, cell, cell)
        T = 3
        for t in range(T):
            np.testing.assert_allclose(states[t].data[:2],
                                       states[T - 1 - t].data[2:],
                                       atol=1e-12)

    def test_matches_oracle(self):
        rng = np.random.default_rng(10)
        for _ in range(100):
            fwd = random_cell(rng, 2, 3, "f")
            bwd = random_cell(rng, 2, 3, "b")
            seq = [rng.normal(size=2) for _ in range(3)]
            states, _, _ = L.bilstm_forward([ad.constant(v) for v in seq],
                                            fwd, bwd)
            expected = bilstm_oracle([v.tolist() for v in seq],
                                     (cell_dicts(fwd)), (cell_dicts(bwd)))
            for got, exp in zip(states, expected):
                np.testing.assert_allclose(got.data, exp, atol=1e-10)

    def test_empty_sequence(self):
        cell = L.LstmCellParams("c", 2, 2, seed=0)
        with pytest.raises(ValueError):
            L.bilstm_forward([], cell, cell)


class TestAttention:
    @staticmethod
    def params(rng, qd, kd, att):
        p = L.AttentionParams("a", qd, kd, att, seed=0)
        p.W1.data = rng.normal(size=p.W1.data.shape)
        p.W2.data = rng.normal(size=p.W2.data.shape)
        p.v.data = rng.normal(size=p.v.data.shape)
        return p

    def test_identical_keys_uniform_weights(self):
        rng = np.random.default_rng(11)
        p = self.params(rng, 3, 3, 4)
        key = rng.normal(size=3)
        keys = [ad.constant(key) for _ in range(5)]
        ctx, w = L.attention([ad.constant(rng.normal(size=3))], keys, p)
        np.testing.assert_allclose(w[0], np.full(5, 0.2), atol=1e-12)
        np.testing.assert_allclose(ctx[0].data, key, atol=1e-12)

    def test_single_key(self):
        rng = np.random.default_rng(12)
        p = self.params(rng, 3, 3, 4)
        key = rng.normal(size=3)
        ctx, w = L.attention([ad.constant(rng.normal(size=3))],
                             [ad.constant(key)], p)
        np.testing.assert_allclose(w, [[1.0]], atol=1e-15)
        np.testing.assert_allclose(ctx[0].data, key, atol=1e-15)

    def test_rows_sum_to_one(self):
        rng = np.random.default_rng(13)
        for _ in range(50):
            p = self.params(rng, 2, 2, 3)
            queries = [ad.constant(rng.normal(size=2)) for _ in range(3)]
            keys = [ad.constant(rng.normal(size=2)) for _ in range(4)]
            _, w = L.attention(queries, keys, p)
            np.testing.assert_allclose(w.sum(axis=1), np.ones(3), atol=1e-9)

    def test_matches_oracle(self):
        rng = np.random.default_rng(14)
        for _ in range(100):
            p = self.params(rng, 2, 3, 4)
            queries = [rng.normal(size=2) for _ in range(2)]
            keys = [rng.normal(size=3) for _ in range(3)]
            ctx, w = L.attention([ad.constant(q) for q in queries],
                                 [ad.constant(k) for k in keys], p)
            ectx, ew = attention_oracle(
                [q.tolist() for q in queries], [k.tolist() for k in keys],
                p.W1.data.tolist(), p.W2.data.tolist(), p.v.data.tolist())
            np.testing.assert_allclose(w, ew, atol=1e-10)
            for got, exp in zip(ctx, ectx):
                np.testing.assert_allclose(got.data, exp, atol=1e-10)


class TestHighway:
    def test_carry_limit(self):
        rng = np.random.default_rng(15)
        p = L.HighwayParams("h", 4, seed=0)
        p.W_h.data = rng.normal(size=(4, 4))
        p.b_t.data = np.full(4, -50.0)
        x = rng.normal(size=4)
        y = L.highway(ad.constant(x), p)
        assert np.max(np.abs(y.data - x)) < 1e-12

    def test_zero_weights_halves_input(self):
        p = L.HighwayParams("h", 3, seed=0)
        for q in p.parameters():
            q.data = np.zeros_like(q.data)
        x = np.array([0.4, -1.0, 2.0])
        y = L.highway(ad.constant(x), p)
        np.testing.assert_allclose(y.data, 0.5 * x, atol=1e-12)

    def test_gate_bias_initialized_negative(self):
        p = L.HighwayParams("h", 3, seed=0)
        np.testing.assert_array_equal(p.b_t.data, np.full(3, -2.0))

    def test_matches_oracle(self):
        rng = np.random.default_rng(16)
        for _ in range(100):
            p = L.HighwayParams("h", 3, seed=0)
            for q in p.parameters():
                q.data = rng.normal(size=q.data.shape)
            x = rng.normal(size=3)
            y = L.highway(ad.constant(x), p)
            exp = highway_oracle(x.tolist(), p.W_h.data.tolist(),
                                 p.b_h.data.tolist(), p.W_t.data.tolist(),
                                 p.b_t.data.tolist())
            np.testing.assert_allclose(y.data, exp, atol=1e-10)

    def test_non_square_rejected(self):
        p = L.HighwayParams("h", 3, seed=0)
        with pytest.raises(ValueError):
            L.highway(ad.constant(np.zeros(4)), p)


class TestInitParams:
    def test_glorot_bound(self):
        t = L.init_params((4, 4), seed=0, scheme="glorot_uniform", name="w")
        bound = np.sqrt(6 / 8)
        assert np.all(np.abs(t) <= bound)
        assert np.any(np.abs(t) > 0)

    def test_zeros(self):
        np.testing.assert_array_equal(
            L.init_params((3,), 0, "zeros"), np.zeros(3))

    def test_forget_bias_one(self):
        np.testing.assert_array_equal(
            L.init_params((3,), 0, "forget_bias_one"), np.ones(3))

    def test_deterministic_per_name_seed(self):
        a = L.init_params((3, 3), 5, "glorot_uniform", "x")
        b = L.init_params((3, 3), 5, "glorot_uniform", "x")
        c = L.init_params((3, 3), 5, "glorot_uniform", "y")
        np.testing.assert_array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_unknown_scheme(self):
        with pytest.raises(ValueError):
            L.init_params((2,), 0, "nope")


class TestGradCheckHarness:
    def test_linear_model_exact(self):
        from framecmd.autodiff import Parameter
        w = Parameter("w", np.array([0.5, -1.5, 2.0]))
        x = np.array([1.0, 2.0, 3.0])

        def fwd():
            return ad.dot(w, ad.constant(x))

        assert grad_check(fwd, [w]) < 1e-10

    def test_corrupted_gradient_detected(self):
        from framecmd.autodiff import Parameter
        w = Parameter("w", np.array([0.5, -1.5, 2.0]))
        x = np.array([1.0, 2.0, 3.0])

        def fwd():
            return ad.dot(w, ad.constant(x))

        err = grad_check(fwd, [w], corrupt=True)
        assert err > 0.1
        np.testing.assert_allclose(err, 1 / 3, atol=1e-6)

    def test_layer_composition(self):
        from framecmd.autodiff import Parameter
        rng = np.random.default_rng(17)
        cell = random_cell(rng, 3, 4, "gc")
        hw = L.HighwayParams("hw", 4, seed=3)
        x = rng.normal(size=3)

        def fwd():
            h, c = L.lstm_cell_forward(ad.constant(x),
                                       ad.constant(np.zeros(4)),
                                       ad.constant(np.zeros(4)), cell)
            y = L.highway(h, hw)
            return ad.dot(y, y)

        params = list(cell.parameters()) + hw.parameters()
        assert grad_check(fwd, params) < 1e-4
