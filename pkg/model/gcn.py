"""Embedding rows for a set of nodes: table lookup (FM) or graph convolution (GEM).

Only the rows a batch needs are computed. For L layers the convolution walks
the L-hop frontier of the requested nodes:

    F_L = nodes,  F_{l-1} = one-hop frontier of F_l,
    Z_1 = A[F_1, F_0] @ W1[F_0],           H_1 = act(Z_1)
    Z_l = (A[F_l, F_{l-1}] @ H_{l-1}) @ W_l, H_l = act(Z_l)

where A is the normalized adjacency. H_0 is the identity basis and never stored.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from errors import GraphError
from model.params import activate


@dataclass
class ConvLayer:
    """Cached values of one convolution layer, kept for the backward pass."""

    rows: np.ndarray  # F_l
    cols: np.ndarray  # F_{l-1}
    block: object  # A[F_l, F_{l-1}] as CSR
    propagated: np.ndarray  # A-block @ H_{l-1}; unused for layer 1
    pre_activation: np.ndarray  # Z_l


@dataclass
class EmbeddingView:
    nodes: np.ndarray
    rows: np.ndarray
    layer_cache: list = field(default_factory=list)

    def position(self, node):
        k = int(np.searchsorted(self.nodes, node))
        if k >= len(self.nodes) or self.nodes[k] != node:
            raise KeyError(f"node {node} is not part of this view")
        return k

    def row(self, node):
        return self.rows[self.position(node)]

    def with_rows(self, rows):
        return replace(self, rows=rows)

    @property
    def input_rows(self):
        """Rows of W1 the view was computed from (F_0)."""
        return self.layer_cache[0].cols if self.layer_cache else self.nodes


def _check_nodes(nodes, num_nodes):
    nodes = np.unique(np.asarray(nodes, dtype=np.int64))
    if len(nodes) and (nodes[0] < 0 or nodes[-1] >= num_nodes):
        bad = nodes[0] if nodes[0] < 0 else nodes[-1]
        raise GraphError(f"node index {bad} outside [0, {num_nodes})")
    return nodes


def lookup_embed(params, nodes):
    """FM embeddings: rows of W1, no propagation."""
    nodes = _check_nodes(nodes, params.num_features)
    return EmbeddingView(nodes=nodes, rows=params.W[0][nodes].copy())


def gcn_embed(norm, params, nodes):
    if params.layers < 1:
        raise ValueError("gcn_embed needs at least one convolution layer")
    if norm.num_nodes != params.num_features:
        raise GraphError(
            f"graph has {norm.num_nodes} nodes but the model has "
            f"{params.num_features} features"
        )
    nodes = _check_nodes(nodes, params.num_features)

    frontiers = [nodes]
    for _ in range(params.layers):
        frontiers.append(norm.frontier(frontiers[-1]))
    frontiers.reverse()

    A = norm.coefficients
    cache = []
    hidden = None
    for l in range(1, params.layers + 1):
        rows, cols = frontiers[l], frontiers[l - 1]
        block = A[rows][:, cols]
        if l == 1:
            propagated = None
            z = block @ params.W[0][cols]
        else:
            propagated = block @ hidden
            z = propagated @ params.W[l - 1]
        hidden = activate(z, params.activation)
        cache.append(ConvLayer(rows, cols, block, propagated, z))

    return EmbeddingView(nodes=nodes, rows=hidden, layer_cache=cache)


def embed(params, norm, nodes):
    if params.uses_graph:
        if norm is None:
            raise GraphError("a model with convolution layers needs a graph")
        return gcn_embed(norm, params, nodes)
    return lookup_embed(params, nodes)
