import logging
import math

import numpy as np

from graph.feature_graph import FeatureGraph

log = logging.getLogger(__name__)


def _keep_count(ratio, degree):
    # round() absorbs float noise such as 0.7 * 10 = 7.000000000000001
    return math.ceil(round(ratio * degree, 9))


def sample_neighbor_lists(graph, ratio, rng):
    """For each node, ceil(ratio * degree) neighbors drawn uniformly without replacement."""
    adj = graph.adjacency()
    kept = []
    for node in range(graph.num_nodes):
        neighbors = adj.indices[adj.indptr[node] : adj.indptr[node + 1]]
        k = _keep_count(ratio, len(neighbors))
        if k >= len(neighbors):
            kept.append(neighbors.copy())
        else:
            kept.append(np.sort(rng.choice(neighbors, size=k, replace=False)))
    return kept


def sample_neighbors(graph, ratio, seed):
    """Keep a random share of each node's neighbors.

    An edge survives when either endpoint keeps it. `seed` may be an int or a
    numpy Generator; ratio 1 returns the graph itself.
    """
    if not 0.0 <= ratio <= 1.0:
        raise ValueError(f"sampling ratio must be in [0, 1], got {ratio}")
    if ratio == 1.0:
        return graph
    if ratio == 0.0:
        return FeatureGraph(graph.num_nodes, np.empty((0, 2), dtype=np.int64),
                            graph.included_fields)

    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    kept = sample_neighbor_lists(graph, ratio, rng)
    counts = [len(k) for k in kept]
    sources = np.repeat(np.arange(graph.num_nodes), counts)
    targets = np.concatenate(kept) if kept else np.empty(0, dtype=np.int64)
    sampled = FeatureGraph(graph.num_nodes, np.stack([sources, targets], axis=1),
                           graph.included_fields)
    log.debug(f"Sampled {sampled.num_edges} of {graph.num_edges} edges at ratio {ratio}")
    return sampled
