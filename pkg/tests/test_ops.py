import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from core import ops
from core.gradcheck import grad_check
from core.tensor import Tape, constant, parameter
from errors import DimensionError


def check(f, params, tol=1e-4, floor=1e-4):
    report = grad_check(f, params, floor=floor)
    assert report.passed, report.to_dict()
    assert report.max_rel_error <= tol


def test_softmax_symmetric_row():
    assert_array_equal(ops.softmax_rows(constant([[0.0, 0.0]])).data, [[0.5, 0.5]])


def test_softmax_is_stable_for_large_inputs():
    out = ops.softmax_rows(constant([[1000.0, 1000.0, -1000.0]])).data
    assert np.all(np.isfinite(out))
    assert_allclose(out, [[0.5, 0.5, 0.0]], atol=1e-300)


def test_relu():
    assert_array_equal(ops.relu(constant([[-1.0, 2.0]])).data, [[0.0, 2.0]])


def test_layer_norm_constant_row_is_zero():
    out = ops.layer_norm(constant([[3.0, 3.0, 3.0, 3.0]]),
                         constant(np.ones((1, 4))), constant(np.zeros((1, 4))))
    assert_array_equal(out.data, np.zeros((1, 4)))


def test_layer_norm_standardises_rows(rng):
    x = rng.normal(3.0, 2.0, size=(4, 16))
    out = ops.layer_norm(constant(x), constant(np.ones((1, 16))), constant(np.zeros((1, 16)))).data
    assert_allclose(out.mean(axis=1), 0.0, atol=1e-12)
    var = x.var(axis=1)
    assert_allclose(out.var(axis=1), var / (var + ops.LAYER_NORM_EPS), rtol=1e-10)


def test_layer_norm_rejects_bad_gain():
    with pytest.raises(DimensionError):
        ops.layer_norm(constant(np.ones((2, 3))), constant(np.ones((1, 2))), constant(np.zeros((1, 3))))


def test_concat_cols_scalars():
    out = ops.concat_cols([constant([[1.0]]), constant([[2.0]]), constant([[3.0]])])
    assert_array_equal(out.data, [[1.0, 2.0, 3.0]])


def test_concat_cols_single_part_is_identity(rng):
    a = rng.normal(size=(2, 2))
    assert_array_equal(ops.concat_cols([constant(a)]).data, a)


def test_concat_cols_gradient_is_ones():
    a = parameter(np.zeros((2, 3)))
    b = parameter(np.zeros((2, 1)))
    with Tape() as tape:
        loss = ops.sum_all(ops.concat_cols([a, b]))
    tape.backward(loss)
    assert_array_equal(a.grad, np.ones((2, 3)))
    assert_array_equal(b.grad, np.ones((2, 1)))


def test_concat_cols_row_mismatch():
    with pytest.raises(DimensionError):
        ops.concat_cols([constant(np.ones((2, 1))), constant(np.ones((3, 1)))])


def test_mean_rows():
    assert_array_equal(ops.mean_rows(constant([[2.0, 4.0], [4.0, 8.0]])).data, [[3.0, 6.0]])


def test_mean_rows_empty_is_zero_row_with_zero_gradient():
    x = parameter(np.zeros((0, 3)))
    with Tape() as tape:
        out = ops.mean_rows(x)
        loss = ops.sum_all(out)
    assert_array_equal(out.data, [[0.0, 0.0, 0.0]])
    tape.backward(loss)
    assert x.grad.shape == (0, 3)


def test_mean_rows_of_identical_rows_is_exact():
    row = np.array([0.1, 0.7, 1.0 / 3.0, -2.2])
    out = ops.mean_rows(constant(np.tile(row, (7, 1)))).data
    assert_array_equal(out[0], row)


def test_add_broadcasts_row_and_sums_its_gradient():
    x = parameter(np.ones((3, 2)))
    b = parameter(np.zeros((1, 2)))
    with Tape() as tape:
        loss = ops.sum_all(ops.add(x, b))
    tape.backward(loss)
    assert_array_equal(b.grad, [[3.0, 3.0]])


def test_add_shape_mismatch():
    with pytest.raises(DimensionError):
        ops.add(constant(np.ones((3, 2))), constant(np.ones((2, 2))))


def test_slice_bounds_checked():
    with pytest.raises(DimensionError):
        ops.slice_rows(constant(np.ones((3, 2))), 1, 4)


@pytest.mark.parametrize('name', ['matmul', 'add', 'sub', 'transpose', 'scale', 'concat_cols',
                                  'concat_rows', 'slice_rows', 'slice_cols', 'mean_rows',
                                  'sum_rows', 'mean_all'])
def test_linear_op_gradients(name, rng, probe):
    a = parameter(rng.normal(size=(5, 4)))
    b = parameter(rng.normal(size=(5, 4)))
    c = parameter(rng.normal(size=(4, 3)))
    build = {
        'matmul': (lambda: ops.matmul(a, c), [a, c]),
        'add': (lambda: ops.add(a, b), [a, b]),
        'sub': (lambda: ops.sub(a, b), [a, b]),
        'transpose': (lambda: ops.transpose(a), [a]),
        'scale': (lambda: ops.scale(a, -1.5), [a]),
        'concat_cols': (lambda: ops.concat_cols([a, b]), [a, b]),
        'concat_rows': (lambda: ops.concat_rows([a, b]), [a, b]),
        'slice_rows': (lambda: ops.slice_rows(a, 1, 4), [a]),
        'slice_cols': (lambda: ops.slice_cols(a, 0, 2), [a]),
        'mean_rows': (lambda: ops.mean_rows(a), [a]),
        'sum_rows': (lambda: ops.sum_rows(a), [a]),
        'mean_all': (lambda: ops.mean_all(a), [a]),
    }
    forward, params = build[name]
    check(lambda: probe(forward()), params, tol=1e-6, floor=1e-2)


@pytest.mark.parametrize('name', ['mul', 'relu', 'softmax_rows', 'layer_norm', 'pearson_cols'])
def test_nonlinear_op_gradients(name, rng, probe):
    a = parameter(rng.normal(size=(5, 4)))
    b = parameter(rng.normal(size=(5, 4)))
    gain = parameter(rng.normal(1.0, 0.1, size=(1, 4)))
    bias = parameter(rng.normal(size=(1, 4)))
    build = {
        'mul': (lambda: ops.mul(a, b), [a, b]),
        'relu': (lambda: ops.relu(a), [a]),
        'softmax_rows': (lambda: ops.softmax_rows(a), [a]),
        'layer_norm': (lambda: ops.layer_norm(a, gain, bias), [a, gain, bias]),
        'pearson_cols': (lambda: ops.pearson_cols(a, b), [a, b]),
    }
    forward, params = build[name]
    check(lambda: probe(forward()), params)


def test_pearson_cols_matches_textbook_formula(rng):
    for _ in range(100):
        x = rng.normal(size=(8, 3))
        y = rng.normal(size=(8, 3))
        expected = [np.corrcoef(x[:, c], y[:, c])[0, 1] for c in range(3)]
        assert_allclose(ops.pearson_cols(constant(x), constant(y)).data[0], expected, atol=1e-10)


def test_pearson_cols_constant_column_scores_zero_without_gradient(rng):
    x = parameter(rng.normal(size=(6, 2)))
    y = rng.normal(size=(6, 2))
    y[:, 1] = 4.0
    with Tape() as tape:
        r = ops.pearson_cols(x, constant(y))
        loss = ops.sum_all(r)
    assert r.data[0, 1] == 0.0
    tape.backward(loss)
    assert_array_equal(x.grad[:, 1], np.zeros(6))
    assert np.all(np.isfinite(x.grad))
