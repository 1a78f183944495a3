"""Testes do núcleo de tensores: autograd, operações e otimizador."""

from __future__ import annotations


import numpy as np
import pytest
from conftest import check_op_gradients

from slim.errors import DimensionError, LabelError
from slim.tensor import SGD, MultiStepLR, Tensor
from slim.tensor.ops import (
    batch_norm,
    conv2d,
    dropout,
    exp_gate,
    global_avg_pool,
    linear,
    max_pool2d,
    relu,
    select,
    softmax_cross_entropy,
)

OP_TOLERANCE = 1e-3


class TestTensor:
    """Tipos, aritmética e acúmulo de gradientes."""

    def test_default_dtype_is_float32(self) -> None:
        assert Tensor([1, 2, 3]).dtype == np.float32

    def test_float64_is_preserved(self) -> None:
        t = Tensor(np.ones(3, dtype=np.float64))
        assert t.dtype == np.float64
        assert (t * 2.0).dtype == np.float64

    def test_branch_gradients_accumulate(self) -> None:
        x = Tensor(np.array([1.0, -2.0, 3.0]), requires_grad=True)
        (x * x + x).sum().backward()
        np.testing.assert_allclose(x.grad, 2 * x.data + 1)

    def test_broadcast_gradient_is_reduced(self) -> None:
        a = Tensor(np.ones((3, 4)), requires_grad=True)
        b = Tensor(np.arange(4.0), requires_grad=True)
        (a * b).sum().backward()
        assert b.grad.shape == (4,)
        np.testing.assert_allclose(b.grad, np.full(4, 3.0))
        np.testing.assert_allclose(a.grad, np.tile(np.arange(4.0), (3, 1)))

    def test_backward_requires_scalar(self) -> None:
        x = Tensor(np.ones(3), requires_grad=True)
        with pytest.raises(ValueError):
            (x * 2.0).backward()

    def test_untracked_operands_get_no_gradient(self) -> None:
        x = Tensor(np.ones(2), requires_grad=True)
        c = Tensor(np.ones(2))
        (x * c).sum().backward()
        assert c.grad is None


class TestGradients:
    """Backward analítico contra diferenças centrais em float64."""

    def test_elementwise(self, rng: np.random.Generator) -> None:
        a = rng.standard_normal((3, 4))
        b = rng.standard_normal((4,))
        for op in (
            lambda x, y: x + y,
            lambda x, y: x * y,
            lambda x, y: x - y,
            lambda x, y: (-x * y).mean().reshape(1),
        ):
            assert max(check_op_gradients(op, a, b, rng=rng)) < OP_TOLERANCE

    def test_conv2d(self, rng: np.random.Generator) -> None:
        x = rng.standard_normal((2, 3, 6, 6))
        w = rng.standard_normal((4, 3, 3, 3))
        errors = check_op_gradients(
            lambda i, k: conv2d(i, k, stride=2, padding=1), x, w, rng=rng
        )
        assert max(errors) < OP_TOLERANCE

    def test_linear(self, rng: np.random.Generator) -> None:
        x = rng.standard_normal((3, 5))
        w = rng.standard_normal((4, 5))
        assert max(check_op_gradients(linear, x, w, rng=rng)) < OP_TOLERANCE

    def test_batch_norm_training(self, rng: np.random.Generator) -> None:
        x = rng.standard_normal((4, 3, 2, 2))
        gamma = rng.standard_normal(3)
        beta = rng.standard_normal(3)

        def op(i: Tensor, g: Tensor, b: Tensor) -> Tensor:
            return batch_norm(i, g, b, np.zeros(3), np.ones(3), training=True)

        assert max(check_op_gradients(op, x, gamma, beta, rng=rng)) < OP_TOLERANCE

    def test_batch_norm_eval(self, rng: np.random.Generator) -> None:
        x = rng.standard_normal((4, 3))
        gamma = rng.standard_normal(3)
        beta = rng.standard_normal(3)
        mean, var = rng.standard_normal(3), rng.uniform(0.5, 2.0, 3)

        def op(i: Tensor, g: Tensor, b: Tensor) -> Tensor:
            return batch_norm(i, g, b, mean.copy(), var.copy(), training=False)

        assert max(check_op_gradients(op, x, gamma, beta, rng=rng)) < OP_TOLERANCE

    def test_exp_gate(self, rng: np.random.Generator) -> None:
        x = rng.standard_normal((2, 3, 4, 4))
        g = rng.standard_normal(3)
        assert max(check_op_gradients(exp_gate, x, g, rng=rng)) < OP_TOLERANCE

    def test_pooling_and_relu(self, rng: np.random.Generator) -> None:
        x = rng.standard_normal((2, 3, 4, 4))
        for op in (relu, max_pool2d, global_avg_pool):
            assert check_op_gradients(op, x, rng=rng)[0] < OP_TOLERANCE

    def test_select(self, rng: np.random.Generator) -> None:
        x = rng.standard_normal((3, 6))
        indices = np.array([4, 0, 2])
        errors = check_op_gradients(lambda i: select(i, indices), x, rng=rng)
        assert errors[0] < OP_TOLERANCE

    def test_softmax_cross_entropy(self, rng: np.random.Generator) -> None:
        z = rng.standard_normal((5, 4))
        labels = np.array([0, 3, 1, 1, 2])
        errors = check_op_gradients(
            lambda i: softmax_cross_entropy(i, labels), z, rng=rng
        )
        assert errors[0] < OP_TOLERANCE


class TestOps:
    """Formatos, erros estruturados e casos de borda."""

    def test_conv2d_output_shape(self, rng: np.random.Generator) -> None:
        x = Tensor(rng.standard_normal((2, 1, 28, 28)).astype(np.float32))
        w = Tensor(rng.standard_normal((20, 1, 5, 5)).astype(np.float32))
        assert conv2d(x, w).shape == (2, 20, 24, 24)

    def test_conv2d_channel_mismatch(self) -> None:
        with pytest.raises(DimensionError) as info:
            conv2d(Tensor(np.zeros((1, 3, 5, 5))), Tensor(np.zeros((2, 4, 3, 3))))

        assert info.value.op == "conv2d"

    def test_conv2d_of_ones(self) -> None:
        out = conv2d(Tensor(np.ones((1, 1, 3, 3))), Tensor(np.ones((1, 1, 3, 3))))
        assert out.data.tolist() == [[[[9.0]]]]

    def test_linear_identity(self) -> None:
        out = linear(Tensor(np.array([[1.0, 2.0, 3.0]])), Tensor(np.eye(3)))
        assert out.data.tolist() == [[1.0, 2.0, 3.0]]

    def test_relu_values(self) -> None:
        assert relu(Tensor(np.array([-1.0, 0.0, 2.0]))).data.tolist() == [0, 0, 2]

    def test_relu_propagates_nan(self) -> None:
        out = relu(Tensor(np.array([np.nan, -1.0], dtype=np.float32)))
        assert np.isnan(out.data[0])
        assert out.data[1] == 0.0

    def test_exp_gate_factor(self) -> None:
        out = exp_gate(Tensor(np.ones((1, 2, 2, 2))), Tensor(np.array([1.0, 0.0])))
        np.testing.assert_allclose(out.data[0, 0], 0.632121, atol=1e-6)
        assert np.all(out.data[0, 1] == 0.0)

    def test_exp_gate_channel_mismatch(self) -> None:
        with pytest.raises(DimensionError):
            exp_gate(Tensor(np.ones((1, 3, 2, 2))), Tensor(np.ones(2)))

    def test_cross_entropy_rejects_bad_label(self) -> None:
        with pytest.raises(LabelError) as info:
            softmax_cross_entropy(Tensor(np.zeros((2, 3))), np.array([0, 3]))

        assert info.value.label == 3
        assert info.value.num_classes == 3

    def test_cross_entropy_of_uniform_logits(self) -> None:
        loss = softmax_cross_entropy(Tensor(np.zeros((4, 10))), np.arange(4))
        assert loss.item() == pytest.approx(np.log(10.0), rel=1e-6)

    def test_cross_entropy_of_saturated_logit(self) -> None:
        logits = np.zeros((2, 10), dtype=np.float32)
        logits[[0, 1], [3, 7]] = 1e9
        loss = softmax_cross_entropy(Tensor(logits), np.array([3, 7]))
        assert loss.item() == pytest.approx(0.0, abs=1e-6)

    def test_dropout_is_identity_in_eval(self, rng: np.random.Generator) -> None:
        x = Tensor(np.ones((3, 4)))
        assert dropout(x, 0.5, training=False, rng=rng) is x

    def test_dropout_rejects_rate_one(self, rng: np.random.Generator) -> None:
        with pytest.raises(ValueError):
            dropout(Tensor(np.ones(2)), 1.0, training=True, rng=rng)

    def test_batch_norm_rejects_nonpositive_epsilon(self) -> None:
        with pytest.raises(ValueError):
            batch_norm(
                Tensor(np.ones((2, 1))),
                Tensor(np.ones(1)),
                Tensor(np.zeros(1)),
                np.zeros(1),
                np.ones(1),
                training=False,
                epsilon=0.0,
            )

    def test_batch_norm_updates_running_stats_only_in_training(self) -> None:
        x = Tensor(np.full((4, 1), 2.0))
        gamma, beta = Tensor(np.ones(1)), Tensor(np.zeros(1))
        mean, var = np.zeros(1), np.ones(1)
        batch_norm(x, gamma, beta, mean, var, training=False)
        assert mean[0] == 0.0

        batch_norm(x, gamma, beta, mean, var, training=True)
        assert mean[0] == pytest.approx(0.2)
        assert var[0] == pytest.approx(0.9)


class TestOptimizer:
    """SGD com momento, decaimento de pesos e agenda de taxa."""

    def test_momentum_step(self) -> None:
        w = Tensor(np.array([1.0]), requires_grad=True, name="w")
        opt = SGD([w], lr=0.1, momentum=0.9)
        for _ in range(2):
            w.grad = np.array([1.0])
            opt.step()

        # buf: 1 → 1.9; w: 1 − 0.1 − 0.19
        assert w.data[0] == pytest.approx(0.71)

    def test_weight_decay(self) -> None:
        w = Tensor(np.array([2.0]), requires_grad=True, name="w")
        opt = SGD([w], lr=0.5, momentum=0.0, weight_decay=0.1)
        w.grad = np.array([0.0])
        opt.step()
        assert w.data[0] == pytest.approx(2.0 - 0.5 * 0.2)

    def test_state_round_trip(self) -> None:
        w = Tensor(np.array([1.0, 2.0]), requires_grad=True, name="w")
        opt = SGD([w], lr=0.1, momentum=0.9)
        w.grad = np.array([0.5, -0.5])
        opt.step()

        other = SGD([w], lr=0.1, momentum=0.9)
        other.load_state(opt.state())
        np.testing.assert_array_equal(other.state()["w"], opt.state()["w"])

    def test_multistep_schedule(self) -> None:
        schedule = MultiStepLR(0.1, (2, 4), 0.1)
        rates = [schedule.lr_at(epoch) for epoch in range(6)]
        assert rates == pytest.approx([0.1, 0.1, 0.01, 0.01, 0.001, 0.001])
