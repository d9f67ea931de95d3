import numpy as np
import pytest

from graph.feature_graph import FeatureGraph
from graph.normalize import normalize
from graph.sampling import sample_neighbor_lists, sample_neighbors
from helpers import random_graph


def star(leaves):
    return FeatureGraph(leaves + 1, np.array([[0, k] for k in range(1, leaves + 1)]))


class TestSampleNeighbors:
    def test_ratio_zero_drops_every_edge(self):
        sampled = sample_neighbors(star(4), 0.0, seed=0)
        assert sampled.num_edges == 0
        C = normalize(sampled).coefficients.toarray()
        np.testing.assert_array_equal(C, np.eye(5))

    def test_ratio_one_is_identity(self):
        graph = star(4)
        assert sample_neighbors(graph, 1.0, seed=0) == graph

    def test_keeps_ceil_of_ratio_per_node(self):
        kept = sample_neighbor_lists(star(4), 0.5, np.random.default_rng(0))
        assert len(kept[0]) == 2
        assert all(len(k) == 1 for k in kept[1:])

    def test_float_noise_does_not_round_up(self):
        kept = sample_neighbor_lists(star(10), 0.7, np.random.default_rng(0))
        assert len(kept[0]) == 7

    def test_sampled_edges_are_a_subset(self):
        rng = np.random.default_rng(2)
        graph = random_graph(rng, 30, 80)
        sampled = sample_neighbors(graph, 0.3, seed=4)
        assert sampled.edge_set() <= graph.edge_set()
        assert 0 < sampled.num_edges < graph.num_edges

    def test_either_endpoint_keeps_the_edge(self):
        rng = np.random.default_rng(5)
        graph = random_graph(rng, 20, 60)
        kept = sample_neighbor_lists(graph, 0.5, np.random.default_rng(1))
        expected = {(min(i, int(j)), max(i, int(j))) for i, ks in enumerate(kept) for j in ks}
        assert sample_neighbors(graph, 0.5, np.random.default_rng(1)).edge_set() == expected

    def test_reproducible_with_seed(self):
        graph = random_graph(np.random.default_rng(3), 25, 70)
        a = sample_neighbors(graph, 0.4, seed=8)
        b = sample_neighbors(graph, 0.4, seed=8)
        np.testing.assert_array_equal(a.edges, b.edges)

    @pytest.mark.parametrize("ratio", [-0.1, 1.5])
    def test_ratio_out_of_range(self, ratio):
        with pytest.raises(ValueError):
            sample_neighbors(star(2), ratio, seed=0)
