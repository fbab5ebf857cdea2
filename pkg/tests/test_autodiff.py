import numpy as np
import pytest

from molvae import autodiff as ad
from molvae.autodiff import ShapeMismatch, Tensor, grad_check


def randn(rng, *shape):
    return Tensor(rng.standard_normal(shape), requires_grad=True)


def test_add_mul_broadcast_grads():
    rng = np.random.default_rng(0)
    a = randn(rng, 3, 4)
    b = randn(rng, 4)      # broadcasts over rows

    def loss():
        return ad.sum_(ad.mul(ad.add(a, b), ad.add(a, 2.0)))

    assert grad_check(loss, [a, b]) < 1e-6


def test_matmul_grads():
    rng = np.random.default_rng(1)
    a = randn(rng, 3, 5)
    b = randn(rng, 5, 2)

    def loss():
        return ad.sum_(ad.square(ad.matmul(a, b)))

    assert grad_check(loss, [a, b]) < 1e-6


def test_matmul_shape_errors():
    a = Tensor(np.zeros((2, 3)))
    with pytest.raises(ShapeMismatch):
        ad.matmul(a, Tensor(np.zeros((4, 2))))
    with pytest.raises(ShapeMismatch):
        ad.matmul(a, Tensor(np.zeros(3)))


def test_nonlinearity_grads():
    rng = np.random.default_rng(2)
    x = randn(rng, 6, 3)

    def loss():
        return ad.sum_(ad.mul(ad.sigmoid(x), ad.tanh(ad.exp(ad.mul(x, 0.3)))))

    assert grad_check(loss, [x]) < 1e-6


def test_sigmoid_extreme_inputs_finite():
    x = Tensor(np.array([-500.0, -30.0, 0.0, 30.0, 500.0]))
    y = ad.sigmoid(x)
    assert np.isfinite(y.data).all()
    assert y.data[0] == pytest.approx(0.0, abs=1e-12)
    assert y.data[-1] == pytest.approx(1.0, abs=1e-12)


def test_reductions_and_reshape():
    rng = np.random.default_rng(3)
    x = randn(rng, 4, 6)

    def loss():
        part = ad.mean(ad.reshape(x, (2, 12)), axis=1)
        return ad.sum_(ad.square(part))

    assert grad_check(loss, [x]) < 1e-6


def test_concat_and_slices():
    rng = np.random.default_rng(4)
    a = randn(rng, 3, 2)
    b = randn(rng, 3, 4)

    def loss():
        joined = ad.concat([a, b], axis=1)
        left = ad.slice_cols(joined, 0, 3)
        return ad.sum_(ad.square(left))

    assert grad_check(loss, [a, b]) < 1e-6


def test_select_time():
    rng = np.random.default_rng(5)
    x = randn(rng, 2, 5, 3)

    def loss():
        return ad.sum_(ad.square(ad.select_time(x, 3)))

    assert grad_check(loss, [x]) < 1e-6


def test_embedding_grads_accumulate_repeated_ids():
    rng = np.random.default_rng(6)
    w = randn(rng, 7, 4)
    ids = np.array([[0, 3, 3], [6, 0, 1]])

    def loss():
        e = ad.embedding(w, ids)
        return ad.sum_(ad.square(e))

    assert grad_check(loss, [w]) < 1e-6
    w.zero_grad()
    out = loss()
    out.backward()
    # row 3 is used twice; its gradient is the sum of both uses
    manual = 2.0 * w.data[3] * 2.0
    np.testing.assert_allclose(w.grad[3], manual, rtol=1e-12)


def test_softmax_cross_entropy_values_and_grads():
    rng = np.random.default_rng(7)
    logits = randn(rng, 5, 9)
    targets = rng.integers(0, 9, size=5)
    mask = np.array([1.0, 1.0, 0.0, 1.0, 1.0])

    out = ad.softmax_cross_entropy(logits, targets, mask)
    shifted = logits.data - logits.data.max(axis=1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    expected = -log_probs[np.arange(5), targets] * mask
    np.testing.assert_allclose(out.data, expected, rtol=1e-12)
    assert out.data[2] == 0.0

    def loss():
        return ad.sum_(ad.softmax_cross_entropy(logits, targets, mask))

    assert grad_check(loss, [logits]) < 1e-6
    logits.zero_grad()
    loss().backward()
    assert np.all(logits.grad[2] == 0.0)  # masked row gets no gradient


def test_no_grad_blocks_graph():
    x = Tensor(np.ones(3), requires_grad=True)
    with ad.no_grad():
        y = ad.mul(x, 2.0)
    assert not y.requires_grad


def test_backward_accumulates_through_shared_node():
    x = Tensor(np.array([2.0]), requires_grad=True)
    y = ad.mul(x, 3.0)
    out = ad.add(ad.square(y), y)  # d/dx = 2*9x + 3 = 18x + 3
    out.backward()
    assert x.grad[0] == pytest.approx(18.0 * 2.0 + 3.0)


def test_scalar_constants_do_not_upcast_float32():
    x = Tensor(np.ones(3, dtype=np.float32), requires_grad=True)
    y = ad.mean(ad.mul(ad.add(x, 1.0), 0.5))
    assert y.dtype == np.float32
