"""FM / GEM scoring in O(d * active features).

Pairwise term, with e_i the embedding of feature i:

    sum_{i<j} x_i x_j <e_i, e_j> = 1/2 sum_f [(sum_i e_if x_i)^2 - sum_i e_if^2 x_i^2]
"""

import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from dataset.libfm import SparseBatch
from errors import GraphError
from model.gcn import embed, gcn_embed

log = logging.getLogger(__name__)


def fm_interaction(instance, embed_fn):
    """Second-order term of one instance; `embed_fn(i)` returns e_i."""
    if len(instance) < 2:
        return 0.0
    x = np.asarray(instance.values, dtype=np.float64)
    E = np.stack([np.asarray(embed_fn(i), dtype=np.float64) for i in instance.indices])
    s = x @ E
    q = (x * x) @ (E * E)
    return 0.5 * float(np.sum(s * s - q))


def _linear(instance, params):
    return float(params.w0) + sum(params.w[i] * v for i, v in instance.entries)


def fm_score(instance, params):
    W1 = params.W[0]
    return _linear(instance, params) + fm_interaction(instance, lambda i: W1[i])


def gem_score(instance, norm, params):
    view = gcn_embed(norm, params, instance.indices)
    return _linear(instance, params) + fm_interaction(instance, view.row)


def interaction_terms(X, E):
    """Batch form of the pairwise term.

    X is a (B, n) CSR matrix over n local features and E holds their (n, d)
    embeddings. Returns s = X E, q = X^2 E^2 and the per-row interaction vector
    1/2 (s^2 - q) of shape (B, d).
    """
    s = X @ E
    q = X.multiply(X) @ (E * E)
    return s, q, 0.5 * (s * s - q)


def batch_linear(batch, params):
    return params.w0 + batch.X @ params.w[batch.nodes]


def _predict_packed(batch, norm, params):
    view = embed(params, norm, batch.nodes)
    _, _, pairwise = interaction_terms(batch.X, view.rows)
    return batch_linear(batch, params) + pairwise.sum(axis=1)


def predict_batch(instances, norm, params, threads=1, chunk_size=4096):
    """Score every instance with dropout disabled; order is preserved."""
    if params.uses_graph and norm is None:
        raise GraphError("a model with convolution layers needs a graph to predict")
    if not params.uses_graph and norm is not None:
        raise GraphError("a plain FM model does not take a graph")
    if not instances:
        return np.empty(0)

    chunks = [
        SparseBatch.from_instances(instances[k : k + chunk_size], params.num_features)
        for k in range(0, len(instances), chunk_size)
    ]
    if threads <= 1 or len(chunks) == 1:
        parts = [_predict_packed(c, norm, params) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda c: _predict_packed(c, norm, params), chunks))
    return np.concatenate(parts)
