import numpy as np
import pytest

from dataset.libfm import SparseBatch
from helpers import random_instance, random_params
from model.scoring import predict_batch
from training.loss import GradientSet, backward
from training.optimizers import OptimizerState, optimizer_step
from training.train_config import TrainConfig


def grads_for(d_w0=0.0, w_rows=(), d_w=(), embedding_rows=(), d_W1=None, dim=2):
    return GradientSet(
        d_w0=d_w0,
        w_rows=np.array(w_rows, dtype=np.int64),
        d_w=np.array(d_w, dtype=np.float64),
        embedding_rows=np.array(embedding_rows, dtype=np.int64),
        d_W1=np.zeros((0, dim)) if d_W1 is None else np.asarray(d_W1, dtype=np.float64),
    )


@pytest.mark.parametrize("kind", ["adagrad", "adam"])
class TestOptimizers:
    def test_zero_gradient_is_a_no_op(self, kind):
        params = random_params(np.random.default_rng(0), 4, 2, 2)
        before = params.copy()
        state = OptimizerState.for_params(kind, params)
        dense = grads_for(w_rows=range(4), d_w=np.zeros(4), embedding_rows=range(4),
                          d_W1=np.zeros((4, 2)))
        dense.d_W_deep = [np.zeros((2, 2))]
        optimizer_step(params, state, dense, TrainConfig(optimizer=kind, learning_rate=0.1))
        assert params.w0 == before.w0
        np.testing.assert_array_equal(params.w, before.w)
        for a, b in zip(params.W, before.W):
            np.testing.assert_array_equal(a, b)

    def test_first_step_moves_by_learning_rate(self, kind):
        params = random_params(np.random.default_rng(0), 4, 2, 0)
        start = params.w[1]
        state = OptimizerState.for_params(kind, params)
        optimizer_step(params, state, grads_for(w_rows=[1], d_w=[3.0]),
                       TrainConfig(optimizer=kind, learning_rate=0.1))
        assert params.w[1] - start == pytest.approx(-0.1, rel=1e-6)

    def test_untouched_rows_keep_values_and_state(self, kind):
        params = random_params(np.random.default_rng(1), 5, 2, 0)
        before = params.copy()
        state = OptimizerState.for_params(kind, params)
        optimizer_step(params, state,
                       grads_for(w_rows=[0, 3], d_w=[1.0, -1.0], embedding_rows=[3],
                                 d_W1=[[0.5, 0.5]]),
                       TrainConfig(optimizer=kind, learning_rate=0.01))
        np.testing.assert_array_equal(params.w[[1, 2, 4]], before.w[[1, 2, 4]])
        np.testing.assert_array_equal(params.W[0][[0, 1, 2, 4]], before.W[0][[0, 1, 2, 4]])
        assert not state.first["W1"][[0, 1, 2, 4]].any()
        assert state.step == 1

    def test_decay_alone_shrinks_parameters(self, kind):
        rng = np.random.default_rng(2)
        params = random_params(rng, 8, 3, 0)
        data = [random_instance(rng, 8, 4) for _ in range(5)]
        batch = SparseBatch.from_instances(data, 8)
        batch.labels = predict_batch(data, None, params)  # zero data gradient
        norm_before = params.squared_norm()
        grads = backward(batch, params, None, None, 0.1, full_decay=True)
        state = OptimizerState.for_params(kind, params)
        optimizer_step(params, state, grads, TrainConfig(optimizer=kind, learning_rate=1e-4))
        assert params.squared_norm() < norm_before


def test_adagrad_accumulates_squares():
    params = random_params(np.random.default_rng(0), 2, 2, 0)
    state = OptimizerState.for_params("adagrad", params)
    config = TrainConfig(optimizer="adagrad", learning_rate=0.1)
    for _ in range(2):
        optimizer_step(params, state, grads_for(w_rows=[0], d_w=[2.0]), config)
    assert state.first["w"][0] == pytest.approx(8.0)
