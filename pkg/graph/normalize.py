from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp


@dataclass(frozen=True, eq=False)
class NormalizedAdjacency:
    """D^-1/2 (A + I) D^-1/2 with entries c(i, j) = 1 / sqrt(d_i * d_j).

    `degrees` are the self-loop degrees d_i = 1 + |neighbors(i)|.
    """

    coefficients: sp.csr_matrix
    degrees: np.ndarray

    @property
    def num_nodes(self):
        return self.coefficients.shape[0]

    def coefficient(self, i, j):
        return float(self.coefficients[i, j])

    def frontier(self, nodes):
        """Nodes reachable in one step from `nodes` (the self-loop keeps `nodes` in)."""
        rows = self.coefficients[nodes]
        return np.unique(rows.indices)


def normalize(graph):
    """Symmetric normalization of A + I over the graph's edge set."""
    n = graph.num_nodes
    degrees = 1 + graph.degrees()

    loops = np.arange(n)
    rows = np.concatenate([graph.edges[:, 0], graph.edges[:, 1], loops])
    cols = np.concatenate([graph.edges[:, 1], graph.edges[:, 0], loops])
    data = 1.0 / np.sqrt(degrees[rows].astype(np.float64) * degrees[cols])

    coefficients = sp.csr_matrix((data, (rows, cols)), shape=(n, n))
    coefficients.sort_indices()
    return NormalizedAdjacency(coefficients=coefficients, degrees=degrees)
