import numpy as np
import pytest

from dataset.field_map import FeatureSpace
from errors import ConfigError, DataFormatError
from evaluation.metrics import evaluate
from graph.feature_graph import build_graph
from helpers import instance, random_params
from training.early_stopping import EarlyStopping
from training.train_config import TrainConfig
from training.trainer import train


def toy_data(n=60, seed=0):
    """user in [0, 4), item in [4, 8); users like items of their own parity."""
    rng = np.random.default_rng(seed)
    data = []
    for _ in range(n):
        u, i = int(rng.integers(0, 4)), int(rng.integers(4, 8))
        data.append(instance(float((u + i) % 2 == 0), [(u, 1.0), (i, 1.0)]))
    return data[: n * 4 // 5], data[n * 4 // 5 :]


SPACE = FeatureSpace(8, ("user", "item"), (0, 4))


def toy_config(**overrides):
    values = dict(layers=0, embedding_dim=4, batch_size=8, max_epochs=6, patience=10,
                  optimizer="adam", learning_rate=0.01, l2_lambda=1e-4, seed=3)
    values.update(overrides)
    return TrainConfig(**values)


class TestEarlyStopping:
    def test_flat_metric_stops_after_patience(self):
        stopper = EarlyStopping(patience=5)
        params = random_params(np.random.default_rng(0), 3, 2, 0)
        stopped = [stopper(0.5, epoch, params) for epoch in range(1, 7)]
        assert stopped == [False] * 5 + [True]
        assert stopper.best_valid_epoch == 1

    def test_strict_improvement_never_stops(self):
        stopper = EarlyStopping(patience=1)
        params = random_params(np.random.default_rng(0), 3, 2, 0)
        assert not any(stopper(1.0 / epoch, epoch, params) for epoch in range(1, 20))
        assert stopper.best_valid_epoch == 19


class TestTrain:
    def test_runs_are_deterministic(self):
        train_set, val_set = toy_data()
        _, a = train(train_set, val_set, SPACE, None, toy_config(layers=0))
        _, b = train(train_set, val_set, SPACE, None, toy_config(layers=0))
        strip = lambda r: [(x.epoch, x.train_loss, x.val_rmse, x.val_mae) for x in r.records]
        assert strip(a) == strip(b)

    def test_loss_goes_down(self):
        train_set, val_set = toy_data()
        _, report = train(train_set, val_set, SPACE, None, toy_config(max_epochs=20))
        assert report.records[-1].train_loss < report.records[0].train_loss

    def test_best_params_match_best_epoch(self):
        train_set, val_set = toy_data()
        params, report = train(train_set, val_set, SPACE, None, toy_config(max_epochs=8))
        best = min(report.records, key=lambda r: r.val_rmse)
        assert report.best_epoch == best.epoch
        assert evaluate(val_set, params).rmse == pytest.approx(best.val_rmse, rel=1e-12)

    @pytest.mark.parametrize("dropout", [0.0, 0.3])
    def test_zero_sampling_gem_trains_like_fm(self, dropout):
        train_set, val_set = toy_data()
        graph = build_graph(train_set, SPACE, mode="all_pairs")
        _, fm = train(train_set, val_set, SPACE, None,
                      toy_config(layers=0, max_epochs=1, dropout_ratio=dropout))
        _, gem = train(train_set, val_set, SPACE, graph,
                       toy_config(layers=1, sampling_ratio=0.0, max_epochs=1,
                                  dropout_ratio=dropout))
        assert gem.records[0].train_loss == fm.records[0].train_loss

    def test_gem_with_dropout_and_sampling(self):
        train_set, val_set = toy_data()
        graph = build_graph(train_set, SPACE, mode="all_pairs")
        params, report = train(
            train_set, val_set, SPACE, graph,
            toy_config(layers=2, activation="relu", sampling_ratio=0.5,
                       dropout_ratio=0.2, interaction_dropout=0.1, max_epochs=3),
        )
        assert params.layers == 2
        assert len(report.records) == 3
        assert report.metadata["loss_reduction"] == "sum"

    def test_layers_without_graph(self):
        train_set, val_set = toy_data()
        with pytest.raises(ConfigError):
            train(train_set, val_set, SPACE, None, toy_config(layers=1))

    def test_label_only_training_instance_rejected(self):
        train_set, val_set = toy_data()
        train_set[5] = instance(1.0, [])
        with pytest.raises(DataFormatError, match="training instance 5 has no features"):
            train(train_set, val_set, SPACE, None, toy_config())

    def test_report_lines(self):
        train_set, val_set = toy_data()
        _, report = train(train_set, val_set, SPACE, None, toy_config(max_epochs=2))
        lines = report.lines()
        assert any(line.startswith("# optimizer=adam") for line in lines)
        assert lines[-1].startswith("best_epoch=")
        assert sum(line.startswith("epoch=") for line in lines) == 2


class TestTrainConfig:
    @pytest.mark.parametrize("field, value", [
        ("optimizer", "sgd"), ("learning_rate", 0.0), ("dropout_ratio", 1.0),
        ("sampling_ratio", 1.5), ("batch_size", 0), ("metric_for_stopping", "auc"),
    ])
    def test_rejects_bad_values(self, field, value):
        with pytest.raises(ConfigError, match=field):
            TrainConfig(**{field: value})
