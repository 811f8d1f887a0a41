"""Forward oracles and gradient checks for the tape-based numeric core.

Expected values are computed independently inside each test (explicit loops
or closed-form math), never by calling the code under test twice.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mvnet.numeric import (
    Graph,
    NumericError,
    ShapeError,
    add,
    add_rowvec,
    concat_rows,
    cross_entropy,
    finite_diff_check,
    gather_rows,
    matmul,
    matvec,
    max_rows,
    mean_scalars,
    mul,
    reshape,
    scale,
    slice_rows,
    softmax_vec,
    sum_all,
    tanh_ew,
    transpose,
)

def _leaf(graph, array):
    return graph.tensor(np.asarray(array, dtype=np.float64), requires_grad=True)


class TestForwardOracles:
    def test_matmul_matches_triple_loop(self, rng):
        a = rng.normal(size=(3, 4))
        b = rng.normal(size=(4, 2))
        expected = np.zeros((3, 2))
        for i in range(3):
            for j in range(2):
                for k in range(4):
                    expected[i, j] += a[i, k] * b[k, j]
        g = Graph()
        out = matmul(_leaf(g, a), _leaf(g, b))
        np.testing.assert_allclose(out.value, expected, rtol=0, atol=1e-14)

    def test_matvec_matches_loop(self, rng):
        a = rng.normal(size=(3, 4))
        x = rng.normal(size=4)
        expected = np.array([sum(a[i, k] * x[k] for k in range(4)) for i in range(3)])
        g = Graph()
        out = matvec(_leaf(g, a), _leaf(g, x))
        np.testing.assert_allclose(out.value, expected, rtol=0, atol=1e-14)

    def test_softmax_matches_direct_formula(self):
        x = np.array([0.5, -1.0, 2.0, 0.0])
        expected = np.exp(x) / np.exp(x).sum()
        g = Graph()
        out = softmax_vec(_leaf(g, x))
        np.testing.assert_allclose(out.value, expected, rtol=1e-15)

    def test_softmax_survives_large_logits(self):
        g = Graph()
        out = softmax_vec(_leaf(g, np.array([1000.0, 1000.0, 999.0])))
        assert np.isfinite(out.value).all()
        assert out.value.sum() == pytest.approx(1.0, abs=1e-12)

    def test_cross_entropy_is_negative_log_probability(self):
        x = np.array([0.2, 1.3, -0.7])
        probs = np.exp(x) / np.exp(x).sum()
        g = Graph()
        out = cross_entropy(_leaf(g, x), 1)
        assert out.item() == pytest.approx(-math.log(probs[1]), rel=1e-12)

    def test_cross_entropy_rejects_bad_label(self):
        g = Graph()
        logits = _leaf(g, np.array([0.0, 1.0]))
        with pytest.raises(ValueError, match="label"):
            cross_entropy(logits, 2)
        with pytest.raises(ValueError, match="label"):
            cross_entropy(logits, -1)

    def test_max_rows_takes_columnwise_maximum(self):
        g = Graph()
        a = _leaf(g, np.array([[1.0, 5.0], [3.0, 2.0], [2.0, 4.0]]))
        np.testing.assert_array_equal(max_rows(a).value, [3.0, 5.0])

    def test_mean_scalars_matches_plain_mean(self, rng):
        values = rng.normal(size=6)
        g = Graph()
        parts = [sum_all(_leaf(g, v)) for v in values]
        assert mean_scalars(parts).item() == pytest.approx(values.mean(), rel=1e-15)


class TestBackwardOracles:
    def test_matmul_gradients_match_loop_formula(self, rng):
        a = rng.normal(size=(3, 4))
        b = rng.normal(size=(4, 2))
        g = Graph()
        ta, tb = _leaf(g, a), _leaf(g, b)
        grads = g.backward(sum_all(matmul(ta, tb)))
        # d/dA sum(AB) has entry [i,k] = sum_j B[k,j]; likewise for B.
        expected_a = np.array([[b[k].sum() for k in range(4)] for _ in range(3)])
        expected_b = np.array([[a[:, k].sum()] * 2 for k in range(4)])
        np.testing.assert_allclose(grads[ta], expected_a, rtol=0, atol=1e-14)
        np.testing.assert_allclose(grads[tb], expected_b, rtol=0, atol=1e-14)

    def test_tanh_gradient_is_one_minus_square(self, rng):
        x = rng.normal(size=5)
        g = Graph()
        tx = _leaf(g, x)
        grads = g.backward(sum_all(tanh_ew(tx)))
        np.testing.assert_allclose(grads[tx], 1.0 - np.tanh(x) ** 2, rtol=1e-14)

    def test_cross_entropy_gradient_is_probs_minus_onehot(self):
        x = np.array([0.2, 1.3, -0.7])
        probs = np.exp(x) / np.exp(x).sum()
        g = Graph()
        tx = _leaf(g, x)
        grads = g.backward(cross_entropy(tx, 1))
        onehot = np.array([0.0, 1.0, 0.0])
        np.testing.assert_allclose(grads[tx], probs - onehot, rtol=1e-12)

    def test_softmax_jacobian_vector_product(self, rng):
        x = rng.normal(size=4)
        c = rng.normal(size=4)
        g = Graph()
        tx = _leaf(g, x)
        y = softmax_vec(tx)
        grads = g.backward(sum_all(mul(y, g.tensor(c))))
        p = np.exp(x - x.max())
        p /= p.sum()
        expected = p * (c - float(c @ p))
        np.testing.assert_allclose(grads[tx], expected, rtol=1e-12, atol=1e-14)

    def test_gather_rows_accumulates_repeated_indices(self):
        g = Graph()
        table = _leaf(g, np.arange(6.0).reshape(3, 2))
        grads = g.backward(sum_all(gather_rows(table, [0, 2, 0])))
        np.testing.assert_array_equal(grads[table], [[2.0, 2.0], [0.0, 0.0], [1.0, 1.0]])

    def test_max_rows_routes_ties_to_first_row(self):
        g = Graph()
        a = _leaf(g, np.array([[2.0, 1.0], [2.0, 3.0]]))
        grads = g.backward(sum_all(max_rows(a)))
        np.testing.assert_array_equal(grads[a], [[1.0, 0.0], [0.0, 1.0]])

    def test_slice_rows_routes_gradient_into_window(self):
        g = Graph()
        a = _leaf(g, np.arange(8.0).reshape(4, 2))
        grads = g.backward(sum_all(slice_rows(a, 1, 3)))
        np.testing.assert_array_equal(
            grads[a], [[0.0, 0.0], [1.0, 1.0], [1.0, 1.0], [0.0, 0.0]])

    def test_unreached_leaf_gets_zero_gradient(self):
        g = Graph()
        used = _leaf(g, np.ones(3))
        unused = _leaf(g, np.ones(2))
        grads = g.backward(sum_all(used))
        np.testing.assert_array_equal(grads[unused], np.zeros(2))

    def test_shared_subexpression_accumulates_both_paths(self):
        g = Graph()
        x = _leaf(g, np.array([2.0]))
        y = add(mul(x, x), x)  # d/dx (x^2 + x) = 2x + 1
        grads = g.backward(sum_all(y))
        np.testing.assert_allclose(grads[x], [5.0], rtol=1e-15)

    def test_backward_is_bit_identical_across_calls(self, rng):
        g = Graph()
        a = _leaf(g, rng.normal(size=(4, 3)))
        b = _leaf(g, rng.normal(size=(3, 3)))
        loss = sum_all(tanh_ew(matmul(a, b)))
        first = {t: v.tobytes() for t, v in g.backward(loss).items()}
        second = {t: v.tobytes() for t, v in g.backward(loss).items()}
        assert first == second


class TestErrors:
    def test_matmul_shape_mismatch(self):
        g = Graph()
        with pytest.raises(ShapeError):
            matmul(_leaf(g, np.ones((2, 3))), _leaf(g, np.ones((2, 3))))

    def test_cross_graph_operands_rejected(self):
        a = _leaf(Graph(), np.ones((2, 2)))
        b = _leaf(Graph(), np.ones((2, 2)))
        with pytest.raises(NumericError, match="graph"):
            matmul(a, b)

    def test_backward_requires_scalar_loss(self):
        g = Graph()
        a = _leaf(g, np.ones(3))
        with pytest.raises(NumericError, match="scalar"):
            g.backward(tanh_ew(a))

    def test_backward_rejects_foreign_loss(self):
        g = Graph()
        other = Graph()
        loss = sum_all(_leaf(other, np.ones(2)))
        _leaf(g, np.ones(2))
        with pytest.raises(NumericError, match="graph"):
            g.backward(loss)

    def test_overflow_to_infinity_is_rejected(self):
        g = Graph()
        big = _leaf(g, np.array([1e308]))
        with np.errstate(over="ignore"), pytest.raises(NumericError, match="non-finite"):
            mul(big, big)

    def test_nan_input_rejected_at_leaf(self):
        with pytest.raises(NumericError, match="non-finite"):
            Graph().tensor(np.array([np.nan]))


class TestProperties:
    @given(st.lists(st.floats(min_value=-30, max_value=30), min_size=1, max_size=8))
    def test_softmax_is_a_distribution(self, values):
        g = Graph()
        out = softmax_vec(g.tensor(np.array(values)))
        assert out.value.sum() == pytest.approx(1.0, abs=1e-9)
        assert (out.value > 0).all()

    @given(st.lists(st.floats(min_value=-30, max_value=30), min_size=1, max_size=8),
           st.floats(min_value=-50, max_value=50))
    def test_softmax_is_shift_invariant(self, values, shift):
        x = np.array(values)
        a = softmax_vec(Graph().tensor(x)).value
        b = softmax_vec(Graph().tensor(x + shift)).value
        np.testing.assert_allclose(a, b, rtol=0, atol=1e-12)

    @given(st.integers(min_value=1, max_value=4), st.integers(min_value=1, max_value=4),
           st.integers(min_value=1, max_value=4), st.integers(min_value=1, max_value=3))
    def test_concat_then_slice_recovers_parts(self, rows_a, rows_b, rows_c, cols):
        rng = np.random.default_rng(rows_a * 64 + rows_b * 8 + rows_c + cols)
        blocks = [rng.normal(size=(r, cols)) for r in (rows_a, rows_b, rows_c)]
        g = Graph()
        stacked = concat_rows([g.tensor(b) for b in blocks])
        start = 0
        for block in blocks:
            window = slice_rows(stacked, start, start + block.shape[0])
            np.testing.assert_array_equal(window.value, block)
            start += block.shape[0]

    @settings(max_examples=25)
    @given(st.integers(min_value=0, max_value=10 ** 6))
    def test_composite_gradient_passes_finite_differences(self, seed):
        rng = np.random.default_rng(seed)
        params = {
            "w": rng.normal(size=(3, 4)) * 0.5,
            "x": rng.normal(size=(4, 2)) * 0.5,
            "b": rng.normal(size=2) * 0.5,
        }

        def build(graph, leaves):
            h = tanh_ew(add_rowvec(matmul(leaves["w"], leaves["x"]), leaves["b"]))
            return sum_all(mul(h, h))

        assert finite_diff_check(build, params) < 1e-6


class TestFiniteDifferences:
    def test_quadratic_gradient_is_numerically_exact(self, rng):
        params = {"x": rng.normal(size=6)}

        def build(graph, leaves):
            x = leaves["x"]
            return add(sum_all(mul(x, x)), scale(sum_all(x), 3.0))

        # Central differences are exact for quadratics, so only rounding remains.
        assert finite_diff_check(build, params) < 1e-8

    def test_deep_tanh_chain(self, rng):
        params = {"a": rng.normal(size=(4, 4)) * 0.3, "v": rng.normal(size=4)}

        def build(graph, leaves):
            h = leaves["v"]
            for _ in range(3):
                h = tanh_ew(matvec(leaves["a"], h))
            return sum_all(h)

        assert finite_diff_check(build, params) < 1e-6

    def test_every_structural_op_in_one_graph(self, rng):
        params = {
            "table": rng.normal(size=(5, 3)),
            "w": rng.normal(size=(3, 3)) * 0.5,
        }

        def build(graph, leaves):
            rows = gather_rows(leaves["table"], [0, 2, 2, 4])
            h = tanh_ew(matmul(rows, leaves["w"]))
            flat = reshape(slice_rows(h, 0, 2), (6,))
            top = max_rows(transpose(h))
            return add(sum_all(flat), cross_entropy(top, 1))

        assert finite_diff_check(build, params) < 1e-6

    def test_probe_arrays_are_restored(self, rng):
        x = rng.normal(size=4)
        params = {"x": x.copy()}

        def build(graph, leaves):
            return sum_all(mul(leaves["x"], leaves["x"]))

        finite_diff_check(build, params)
        np.testing.assert_array_equal(params["x"], x)
