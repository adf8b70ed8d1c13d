import threading

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from core import ops
from core.tensor import Tape, Tensor, active_tape, backward, constant, parameter
from errors import ContractError, DimensionError
from services.predictor_service import loss_mse


def test_tensor_promotes_to_2d_float64():
    assert Tensor(3).shape == (1, 1)
    assert Tensor([1, 2, 3]).shape == (1, 3)
    assert Tensor([[1, 2]]).data.dtype == np.float64


def test_tensor_rejects_3d():
    with pytest.raises(DimensionError):
        Tensor(np.zeros((2, 2, 2)))


def test_item_needs_scalar():
    with pytest.raises(ContractError):
        Tensor([[1.0, 2.0]]).item()


def test_matmul_identity():
    out = ops.matmul(constant([[1, 0], [0, 1]]), constant([[5, 6], [7, 8]]))
    assert_array_equal(out.data, [[5, 6], [7, 8]])


def test_matmul_hand_computed():
    assert_array_equal(ops.matmul(constant([[1, 2]]), constant([[3], [4]])).data, [[11]])


def test_matmul_identity_both_sides_is_exact(rng):
    a = rng.integers(-9, 9, size=(3, 3)).astype(float)
    eye = constant(np.eye(3))
    assert_array_equal(ops.matmul(eye, constant(a)).data, a)
    assert_array_equal(ops.matmul(constant(a), eye).data, a)


def test_matmul_shape_mismatch_names_both_shapes():
    with pytest.raises(DimensionError, match=r'\(2, 3\).*\(2, 2\)'):
        ops.matmul(constant(np.ones((2, 3))), constant(np.ones((2, 2))))


def test_backward_of_sum_gives_ones():
    w = parameter(np.arange(4.0).reshape(2, 2))
    with Tape() as tape:
        loss = ops.sum_all(w)
    tape.backward(loss)
    assert_array_equal(w.grad, np.ones((2, 2)))


def test_backward_of_mse_against_itself_is_zero(rng):
    x = parameter(rng.normal(size=(3, 4)))
    with Tape():
        loss = loss_mse(x, x)
    backward(loss)
    assert_array_equal(x.grad, np.zeros((3, 4)))


def test_matmul_backward_rule(rng):
    a = parameter(rng.normal(size=(4, 3)))
    b = parameter(rng.normal(size=(3, 2)))
    g = rng.normal(size=(4, 2))
    with Tape() as tape:
        loss = ops.sum_all(ops.mul(ops.matmul(a, b), constant(g)))
    tape.backward(loss)
    np.testing.assert_allclose(a.grad, g @ b.data.T, rtol=1e-12)
    np.testing.assert_allclose(b.grad, a.data.T @ g, rtol=1e-12)


def test_non_scalar_loss_is_contract_error():
    w = parameter(np.ones((2, 2)))
    with Tape() as tape:
        out = ops.scale(w, 2.0)
    with pytest.raises(ContractError):
        tape.backward(out)


def test_second_replay_is_contract_error():
    w = parameter(np.ones((2, 2)))
    with Tape() as tape:
        loss = ops.sum_all(w)
    tape.backward(loss)
    with pytest.raises(ContractError):
        tape.backward(loss)


def test_loss_without_tape_is_contract_error():
    w = parameter(np.ones((2, 2)))
    loss = ops.sum_all(w)
    with pytest.raises(ContractError):
        backward(loss)


def test_foreign_loss_is_contract_error():
    w = parameter(np.ones((1, 1)))
    with Tape():
        loss = ops.sum_all(w)
    with Tape() as other:
        pass
    with pytest.raises(ContractError):
        other.backward(loss)


def test_constants_are_not_recorded():
    with Tape() as tape:
        ops.add(constant([[1.0]]), constant([[2.0]]))
    assert len(tape) == 0


def test_gradients_accumulate_over_shared_uses():
    w = parameter([[3.0]])
    with Tape() as tape:
        loss = ops.add(ops.mul(w, w), w)
    tape.backward(loss)
    assert_array_equal(w.grad, [[7.0]])


def test_backward_is_deterministic(rng):
    data = rng.normal(size=(5, 4))
    grads = []
    for _ in range(2):
        w = parameter(data)
        with Tape() as tape:
            h = ops.layer_norm(w, constant(np.ones((1, 4))), constant(np.zeros((1, 4))))
            loss = ops.sum_all(ops.mul(ops.softmax_rows(h), h))
        tape.backward(loss)
        grads.append(w.grad)
    assert_array_equal(grads[0], grads[1])


def test_tapes_are_thread_local():
    seen = []
    with Tape():
        thread = threading.Thread(target=lambda: seen.append(active_tape()))
        thread.start()
        thread.join()
    assert seen == [None]
    assert active_tape() is None
