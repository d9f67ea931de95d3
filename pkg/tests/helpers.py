"""Brute-force oracles and small fixtures shared by the test modules."""

import numpy as np

from dataset.field_map import FeatureSpace
from dataset.libfm import SparseInstance
from graph.feature_graph import FeatureGraph
from model.params import ModelParams, activate


def instance(label, entries):
    return SparseInstance.from_entries(label, entries)


def random_instance(rng, num_features, max_active, low=-2.0, high=2.0):
    k = int(rng.integers(1, max_active + 1))
    idx = rng.choice(num_features, size=min(k, num_features), replace=False)
    return SparseInstance.from_entries(
        float(rng.normal()), [(int(i), float(rng.uniform(low, high))) for i in idx]
    )


def pairwise_oracle(inst, embedding):
    """sum_{i<j} x_i x_j <e_i, e_j> by direct double loop."""
    total = 0.0
    entries = inst.entries
    for a in range(len(entries)):
        for b in range(a + 1, len(entries)):
            (i, xi), (j, xj) = entries[a], entries[b]
            total += xi * xj * float(np.dot(embedding(i), embedding(j)))
    return total


def score_oracle(inst, params, embedding):
    linear = params.w0 + sum(params.w[i] * x for i, x in inst.entries)
    return linear + pairwise_oracle(inst, embedding)


def dense_gcn_oracle(graph, params):
    """All embedding rows via dense D^-1/2 (A + I) D^-1/2 products."""
    A = graph.adjacency().toarray() + np.eye(graph.num_nodes)
    d = A.sum(axis=1)
    A_hat = A / np.sqrt(np.outer(d, d))
    H = activate(A_hat @ params.W[0], params.activation)
    for Wl in params.W[1:]:
        H = activate(A_hat @ H @ Wl, params.activation)
    return H


def random_params(rng, num_features, dim, layers, activation="identity", std=0.3):
    W = [rng.normal(0, std, size=(num_features, dim))]
    W += [rng.normal(0, std, size=(dim, dim)) for _ in range(max(0, layers - 1))]
    return ModelParams(
        w0=float(rng.normal(0, std)),
        w=rng.normal(0, std, size=num_features),
        W=W,
        layers=layers,
        activation=activation,
    )


def random_graph(rng, num_nodes, num_edges):
    pairs = set()
    while len(pairs) < num_edges:
        i, j = rng.choice(num_nodes, size=2, replace=False)
        pairs.add((min(i, j), max(i, j)))
    return FeatureGraph(num_nodes, np.array(sorted(pairs)))


def four_field_space():
    """user [0,2), item [2,4), city [4,6), country [6,8)."""
    return FeatureSpace(8, ("user", "item", "city", "country"), (0, 2, 4, 6))
