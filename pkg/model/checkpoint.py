"""Binary model checkpoint.

Layout (little-endian):
    8 bytes   magic "GEMFM\\0\\0\\1"
    3 x int64 m, d, L
    int64 + bytes   activation name (utf-8)
    float64   w0, w (m), W1 (m x d), W2..WL (d x d each), row-major
    int64 + int64 pairs   graph edge count and edges (0 for plain FM)
"""

import logging
import struct

import numpy as np

from errors import CheckpointError
from graph.feature_graph import FeatureGraph
from model.params import ModelParams

log = logging.getLogger(__name__)

MAGIC = b"GEMFM\x00\x00\x01"
HEADER_FORMAT = "<qqq"


def save_checkpoint(path, params, graph=None):
    if params.uses_graph and graph is None:
        raise CheckpointError("a model with convolution layers must be saved with its graph")
    m, d = params.num_features, params.dim
    activation = params.activation.encode("utf-8")
    edges = graph.edges if (graph is not None and params.uses_graph) else np.empty((0, 2))

    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack(HEADER_FORMAT, m, d, params.layers))
        f.write(struct.pack("<q", len(activation)))
        f.write(activation)
        f.write(np.asarray([params.w0], dtype="<f8").tobytes())
        f.write(np.ascontiguousarray(params.w, dtype="<f8").tobytes())
        for Wl in params.W:
            f.write(np.ascontiguousarray(Wl, dtype="<f8").tobytes())
        f.write(struct.pack("<q", len(edges)))
        f.write(np.ascontiguousarray(edges, dtype="<i8").tobytes())
    log.info(f"Checkpoint saved to {path}")


class _Reader:
    def __init__(self, data, path):
        self.data = data
        self.path = path
        self.offset = 0

    def take(self, size, what):
        if self.offset + size > len(self.data):
            raise CheckpointError(f"{self.path}: truncated while reading {what}")
        chunk = self.data[self.offset : self.offset + size]
        self.offset += size
        return chunk

    def floats(self, count, what):
        return np.frombuffer(self.take(8 * count, what), dtype="<f8").astype(np.float64)


def load_checkpoint(path):
    """Return (ModelParams, FeatureGraph or None); shapes are validated."""
    with open(path, "rb") as f:
        reader = _Reader(f.read(), path)

    if reader.take(len(MAGIC), "magic") != MAGIC:
        raise CheckpointError(f"{path}: not a GEMFM checkpoint (bad magic header)")
    m, d, layers = struct.unpack(HEADER_FORMAT, reader.take(24, "header"))
    if m < 1 or d < 1 or layers < 0:
        raise CheckpointError(f"{path}: invalid shape m={m} d={d} L={layers}")
    (name_len,) = struct.unpack("<q", reader.take(8, "activation length"))
    if not 0 < name_len < 64:
        raise CheckpointError(f"{path}: invalid activation name length {name_len}")
    activation = reader.take(name_len, "activation").decode("utf-8")

    w0 = float(reader.floats(1, "w0")[0])
    w = reader.floats(m, "w")
    W = [reader.floats(m * d, "W1").reshape(m, d)]
    for l in range(2, layers + 1):
        W.append(reader.floats(d * d, f"W{l}").reshape(d, d))

    (num_edges,) = struct.unpack("<q", reader.take(8, "edge count"))
    if num_edges < 0:
        raise CheckpointError(f"{path}: negative edge count")
    edges = np.frombuffer(reader.take(16 * num_edges, "edges"), dtype="<i8")
    if reader.offset != len(reader.data):
        raise CheckpointError(f"{path}: {len(reader.data) - reader.offset} trailing bytes")

    try:
        params = ModelParams(w0=w0, w=w, W=W, layers=layers, activation=activation)
        graph = (
            FeatureGraph(m, edges.astype(np.int64).reshape(-1, 2))
            if layers >= 1
            else None
        )
    except ValueError as e:
        raise CheckpointError(f"{path}: {e}") from None
    log.info(f"Checkpoint loaded from {path}: m={m} d={d} L={layers} ({activation})")
    return params, graph
