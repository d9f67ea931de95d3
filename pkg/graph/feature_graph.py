"""Feature co-occurrence graph: one node per feature, binary undirected edges."""

import logging
from dataclasses import dataclass
from itertools import combinations

import numpy as np
import scipy.sparse as sp

import config
from errors import GraphError

log = logging.getLogger(__name__)

ALL_PAIRS = "all_pairs"
PAIR_LIST = "pair_list"
GRAPH_MODES = (ALL_PAIRS, PAIR_LIST)


def _canonical_edges(num_nodes, edges):
    """Validate and deduplicate an (E, 2) edge array into sorted rows with i < j."""
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if len(edges) == 0:
        return np.empty((0, 2), dtype=np.int64)
    if edges.min() < 0 or edges.max() >= num_nodes:
        bad = edges[(edges < 0) | (edges >= num_nodes)][0]
        raise GraphError(f"edge endpoint {bad} outside [0, {num_nodes})")
    if np.any(edges[:, 0] == edges[:, 1]):
        node = edges[edges[:, 0] == edges[:, 1]][0, 0]
        raise GraphError(f"self-edge on node {node}; self-loops are added at normalization")
    lo = edges.min(axis=1)
    hi = edges.max(axis=1)
    keys = np.unique(lo * num_nodes + hi)
    return np.stack([keys // num_nodes, keys % num_nodes], axis=1)


@dataclass(frozen=True, eq=False)
class FeatureGraph:
    """Undirected graph over feature indices.

    Each edge is stored once as (i, j) with i < j. `included_fields` is None
    when unknown (e.g. a graph file without a fields line).
    """

    num_nodes: int
    edges: np.ndarray
    included_fields: frozenset = None

    def __post_init__(self):
        object.__setattr__(self, "edges", _canonical_edges(self.num_nodes, self.edges))

    @property
    def num_edges(self):
        return len(self.edges)

    def adjacency(self):
        """Symmetric binary adjacency A as CSR (no self-loops)."""
        rows = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
        cols = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
        data = np.ones(len(rows))
        adj = sp.csr_matrix((data, (rows, cols)), shape=(self.num_nodes, self.num_nodes))
        adj.sort_indices()
        return adj

    def degrees(self):
        return np.bincount(self.edges.ravel(), minlength=self.num_nodes)

    def edge_set(self):
        return {(int(i), int(j)) for i, j in self.edges}

    def __eq__(self, other):
        if not isinstance(other, FeatureGraph):
            return NotImplemented
        return self.num_nodes == other.num_nodes and np.array_equal(self.edges, other.edges)

    def check_fields(self, space):
        """Raise if an edge endpoint lies outside the included fields."""
        if self.included_fields is None or not len(self.edges):
            return
        field_of = space.field_of
        outside = ~np.isin(field_of[self.edges], sorted(self.included_fields))
        if outside.any():
            node = int(self.edges[outside][0])
            field = space.field_names[space.field_of_feature(node)]
            raise GraphError(
                f"node {node} belongs to field {field!r}, which the graph does not include"
            )


def build_graph(instances, space, mode=ALL_PAIRS, included_fields=None, field_pairs=None,
                low_cardinality_threshold=config.Graph_Config.LOW_CARDINALITY_THRESHOLD):
    """Connect features that co-occur in an instance.

    all_pairs: every co-occurring pair whose fields are both included.
    pair_list: only pairs whose (unordered) field pair is listed in field_pairs.
    Fields may be given by name or id; included_fields=None means all fields.
    Included fields with fewer than `low_cardinality_threshold` features are
    logged as warnings.
    """
    if mode not in GRAPH_MODES:
        raise GraphError(f"unknown graph mode {mode!r}; expected one of {GRAPH_MODES}")

    if included_fields is None:
        included = set(range(space.num_fields))
    else:
        included = {space.field_id(f) for f in included_fields}

    allowed_pairs = None
    if mode == PAIR_LIST:
        if not field_pairs:
            raise GraphError("pair_list mode needs at least one field pair")
        allowed_pairs = set()
        for a, b in field_pairs:
            a, b = space.field_id(a), space.field_id(b)
            allowed_pairs.add((min(a, b), max(a, b)))
        if included_fields is None:
            included = {f for pair in allowed_pairs for f in pair}
        stray = {f for pair in allowed_pairs for f in pair} - included
        if stray:
            raise GraphError(
                f"field pairs use fields outside the included set: "
                f"{', '.join(space.field_names[f] for f in sorted(stray))}"
            )

    warn_low_cardinality(space, included, low_cardinality_threshold)

    m = space.num_features
    field_of = space.field_of
    keys = set()
    for n, instance in enumerate(instances):
        if instance.max_index() >= m:
            raise GraphError(
                f"instance {n} references feature {instance.max_index()} "
                f"outside [0, {m})"
            )
        active = [i for i in instance.indices if field_of[i] in included]
        for i, j in combinations(active, 2):
            if allowed_pairs is not None:
                fi, fj = field_of[i], field_of[j]
                if (min(fi, fj), max(fi, fj)) not in allowed_pairs:
                    continue
            keys.add(i * m + j)
        if n and n % 100000 == 0:
            log.debug(f"Scanned {n} instances, {len(keys)} edges so far")

    keys = np.fromiter(sorted(keys), dtype=np.int64, count=len(keys))
    edges = np.stack([keys // m, keys % m], axis=1) if len(keys) else np.empty((0, 2))
    graph = FeatureGraph(m, edges, frozenset(included))
    log.info(f"Graph built: {m} nodes, {graph.num_edges} edges")
    return graph


def low_cardinality_fields(space, fields, threshold):
    """Fields with fewer than `threshold` features; such nodes connect to nearly everything."""
    return [f for f in sorted(fields) if space.cardinality(f) < threshold]


def warn_low_cardinality(space, fields, threshold):
    flagged = low_cardinality_fields(space, fields, threshold)
    for f in flagged:
        log.warning(
            f"Field {space.field_names[f]!r} has only {space.cardinality(f)} "
            f"features (< {threshold}); its nodes will connect to most of the graph"
        )
    return flagged


def degree_histogram(graph):
    """Count nodes per degree bucket: 0, 1, 2-3, 4-7, ... as (low, high, count)."""
    degrees = graph.degrees()
    buckets = []
    zero = int(np.sum(degrees == 0))
    buckets.append((0, 0, zero))
    low = 1
    top = int(degrees.max()) if len(degrees) else 0
    while low <= top:
        high = 2 * low - 1
        count = int(np.sum((degrees >= low) & (degrees <= high)))
        buckets.append((low, high, count))
        low *= 2
    return buckets


def save_graph(path, graph):
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"nodes {graph.num_nodes}\n")
        if graph.included_fields is not None:
            f.write("# fields " + " ".join(str(x) for x in sorted(graph.included_fields)) + "\n")
        for i, j in graph.edges:
            f.write(f"{i} {j}\n")


def load_graph(path):
    """Read an edge-list file; endpoints and self-edges are re-validated."""
    num_nodes = None
    included = None
    edges = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                if text.startswith("#"):
                    parts = text[1:].split()
                    if parts and parts[0] == "fields":
                        included = frozenset(int(x) for x in parts[1:])
                    continue
                parts = text.split()
                if num_nodes is None:
                    if len(parts) != 2 or parts[0] != "nodes":
                        raise GraphError(f"{path}:{lineno}: expected 'nodes <m>' header")
                    num_nodes = int(parts[1])
                    continue
                if len(parts) != 2:
                    raise GraphError(f"{path}:{lineno}: expected 'i j', got {text!r}")
                edges.append((int(parts[0]), int(parts[1])))
            except ValueError:
                raise GraphError(f"{path}:{lineno}: non-integer value in {text!r}") from None
    if num_nodes is None:
        raise GraphError(f"{path}: missing 'nodes <m>' header")
    try:
        return FeatureGraph(num_nodes, np.array(edges, dtype=np.int64), included)
    except GraphError as e:
        raise GraphError(f"{path}: {e}") from None
