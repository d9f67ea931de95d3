"""End-to-end checks on processed Frappe files.

Set GEMFM_FRAPPE_DIR to a directory holding train.libfm, validation.libfm,
test.libfm and fields.tsv. These runs take tens of minutes on a laptop CPU.
"""

import os
from pathlib import Path

import numpy as np
import pytest

from dataset.field_map import load_field_map
from dataset.libfm import load_libfm_file
from evaluation.metrics import count_params, evaluate
from graph.feature_graph import build_graph
from graph.normalize import normalize
from model.params import init_params
from training.train_config import TrainConfig
from training.trainer import train


FRAPPE_DIR = os.environ.get("GEMFM_FRAPPE_DIR")

pytestmark = pytest.mark.skipif(not FRAPPE_DIR, reason="GEMFM_FRAPPE_DIR is not set")

GRAPH_FIELDS = ("user", "item", "city", "country")


@pytest.fixture(scope="module")
def frappe():
    root = Path(FRAPPE_DIR)
    space = load_field_map(root / "fields.tsv")
    parts = {name: load_libfm_file(root / f"{name}.libfm")
             for name in ("train", "validation", "test")}
    fields = [f for f in GRAPH_FIELDS if f in space.field_names] or None
    graph = build_graph(parts["train"], space, included_fields=fields)
    return space, parts, graph


def desk_config(**overrides):
    values = dict(embedding_dim=64, optimizer="adam", learning_rate=0.001,
                  l2_lambda=1e-5, batch_size=4096, max_epochs=30, patience=5, seed=2020)
    values.update(overrides)
    return TrainConfig(**values)


def fit_and_score(space, parts, graph, **overrides):
    config = desk_config(**overrides)
    params, _ = train(parts["train"], parts["validation"], space,
                      graph if config.layers else None, config)
    norm = normalize(graph) if config.layers else None
    return evaluate(parts["test"], params, norm).rmse


def best_over_dropout(space, parts, graph, **overrides):
    return min(fit_and_score(space, parts, graph, dropout_ratio=r, **overrides)
               for r in (0.0, 0.2, 0.4))


class TestFrappe:
    def test_one_layer_adds_no_parameters(self, frappe):
        space, _, _ = frappe
        m = space.num_features
        fm = count_params(init_params(m, 256, 0, seed=0))
        gem = count_params(init_params(m, 256, 1, seed=0))
        assert fm == gem
        assert abs(fm - 1.383e6) / 1.383e6 < 0.01

    def test_gem_beats_fm(self, frappe):
        space, parts, graph = frappe
        fm = best_over_dropout(space, parts, graph, layers=0)
        gem = best_over_dropout(space, parts, graph, layers=1)
        assert gem < fm
        assert (fm - gem) / fm >= 0.01

    def test_more_neighbors_help(self, frappe):
        space, parts, graph = frappe
        sparse = fit_and_score(space, parts, graph, layers=1, sampling_ratio=0.1, dropout_ratio=0.2)
        full = fit_and_score(space, parts, graph, layers=1, sampling_ratio=1.0, dropout_ratio=0.2)
        assert np.isfinite(full) and full < sparse
