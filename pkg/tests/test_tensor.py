import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from errors import ConfigurationError, ConsistencyError, DimensionError
from numeric import ops
from numeric.tensor import Tape, Tensor, get_default_dtype, set_default_dtype


def test_default_precision_is_float32():
    assert get_default_dtype() is np.float32
    assert Tensor([1.0, 2.0]).dtype == np.float32


def test_precision_switch(float64):
    assert Tensor([1.0]).dtype == np.float64


def test_unknown_precision_rejected():
    with pytest.raises(ConfigurationError) as e:
        set_default_dtype('float16')
    assert e.value.field == 'precision'


def test_matmul_identity():
    a = Tensor(np.eye(2))
    b = Tensor([[1, 2], [3, 4]])
    np.testing.assert_array_equal(ops.matmul(a, b).numpy(), [[1, 2], [3, 4]])


def test_matmul_hand_case():
    assert ops.matmul(Tensor([[1, 2]]), Tensor([[3], [4]])).numpy().tolist() == [[11]]


def test_matmul_shape_mismatch_names_shapes():
    with pytest.raises(DimensionError, match=r'\[2, 3\].*\[2, 3\]'):
        ops.matmul(Tensor(np.zeros((2, 3))), Tensor(np.zeros((2, 3))))


def test_broadcast_rules():
    a = Tensor(np.ones((3, 4)))
    assert ops.add(a, Tensor(np.arange(4))).shape == (3, 4)
    with pytest.raises(DimensionError):
        ops.add(a, Tensor(np.ones((3, 1))))


def test_relu_and_sigmoid():
    np.testing.assert_array_equal(ops.elementwise('relu', Tensor([-1.0, 0.0, 2.0])).numpy(), [0, 0, 2])
    assert ops.elementwise('sigmoid', Tensor([0.0])).numpy()[0] == pytest.approx(0.5)


def test_unknown_elementwise_op():
    with pytest.raises(ConfigurationError):
        ops.elementwise('tanh', Tensor([0.0]))


def test_softmax_examples():
    np.testing.assert_allclose(ops.softmax(Tensor([0.0, 0.0])).numpy(), [0.5, 0.5])
    np.testing.assert_allclose(ops.softmax(Tensor([1000.0, 1000.0])).numpy(), [0.5, 0.5])
    np.testing.assert_allclose(ops.softmax(Tensor([0.0, math.log(3.0)])).numpy(), [0.25, 0.75], rtol=1e-6)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-50, 50), min_size=1, max_size=8), st.floats(-100, 100))
def test_softmax_shift_invariant(values, shift):
    x = np.asarray(values)
    a = ops.softmax(Tensor(x, dtype=np.float64)).numpy()
    b = ops.softmax(Tensor(x + shift, dtype=np.float64)).numpy()
    np.testing.assert_allclose(a, b, atol=1e-9)
    assert a.sum() == pytest.approx(1.0)


def test_reduce_examples():
    np.testing.assert_array_equal(ops.mean(Tensor([[1, 3], [5, 7]]), axis=0).numpy(), [3, 5])
    assert ops.sum(Tensor(np.zeros(5))).item() == 0.0
    assert ops.mean(Tensor(np.ones((51, 64))), axis=0).shape == (64,)


def test_reduce_bad_axis():
    with pytest.raises(DimensionError):
        ops.mean(Tensor(np.ones((2, 2))), axis=2)


def test_conv_scaling_kernel():
    x = Tensor(np.arange(16.0).reshape(4, 4, 1))
    y = ops.conv2d_same(x, Tensor(np.full((1, 1, 1, 1), 2.0)), Tensor(np.zeros(1)))
    assert y.shape == (4, 4, 1)
    np.testing.assert_array_equal(y.numpy(), 2 * x.numpy())


def test_conv_counts_overlaps():
    y = ops.conv2d_same(Tensor(np.ones((3, 3, 1))), Tensor(np.ones((3, 3, 1, 1)))).numpy()
    assert y[1, 1, 0] == 9
    assert y[0, 0, 0] == 4


def test_conv_full_grid_shape():
    y = ops.conv2d_same(Tensor(np.zeros((612, 14, 2))), Tensor(np.zeros((12, 2, 2, 8))), Tensor(np.zeros(8)))
    assert y.shape == (612, 14, 8)


def test_same_padding_even_kernels():
    assert ops.same_padding(12) == (5, 6)
    assert ops.same_padding(7) == (3, 3)
    assert ops.same_padding(1) == (0, 0)


def test_conv_channel_mismatch():
    with pytest.raises(DimensionError):
        ops.conv2d_same(Tensor(np.zeros((4, 4, 3))), Tensor(np.zeros((2, 2, 2, 1))))


def test_backward_populates_every_leaf(float64):
    a = Tensor(np.ones((2, 3)), requires_grad=True)
    b = Tensor(np.ones((3, 2)), requires_grad=True)
    with Tape() as tape:
        loss = ops.sum(ops.matmul(a, b))
    tape.backward(loss)
    assert a.grad.shape == a.shape
    assert b.grad.shape == b.shape
    np.testing.assert_array_equal(a.grad.numpy(), np.full((2, 3), 2.0))


def test_tape_is_single_use(float64):
    a = Tensor([1.0, 2.0], requires_grad=True)
    with Tape() as tape:
        loss = ops.sum(a)
    tape.backward(loss)
    with pytest.raises(ConsistencyError):
        tape.backward(loss)


def test_backward_needs_scalar(float64):
    a = Tensor([1.0, 2.0], requires_grad=True)
    with Tape() as tape:
        out = ops.scale(a, 2.0)
    with pytest.raises(ConsistencyError):
        tape.backward(out)


def test_no_recording_without_tape():
    a = Tensor([1.0], requires_grad=True)
    out = ops.relu(a)
    with pytest.raises(ConsistencyError):
        out.backward()


def test_constants_are_not_recorded():
    with Tape() as tape:
        ops.add(Tensor([1.0]), Tensor([2.0]))
    assert len(tape) == 0
