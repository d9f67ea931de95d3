"""Sparse instances and the libFM text format (`label idx:value ...`)."""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from errors import DataFormatError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SparseInstance:
    """One transaction: a label and (index, value) pairs sorted by index."""

    label: float
    indices: tuple
    values: tuple

    def __post_init__(self):
        if len(self.indices) != len(self.values):
            raise DataFormatError("indices and values differ in length")
        for prev, cur in zip(self.indices, self.indices[1:]):
            if cur <= prev:
                raise DataFormatError(
                    f"indices must be strictly increasing, got {prev} then {cur}"
                )
        if self.indices and self.indices[0] < 0:
            raise DataFormatError(f"negative feature index {self.indices[0]}")

    @classmethod
    def from_entries(cls, label, entries):
        """Build from unordered (index, value) pairs; duplicates are rejected."""
        entries = sorted((int(i), float(v)) for i, v in entries)
        for (a, _), (b, _) in zip(entries, entries[1:]):
            if a == b:
                raise DataFormatError(f"duplicate index {a}")
        return cls(
            float(label),
            tuple(i for i, _ in entries),
            tuple(v for _, v in entries),
        )

    @property
    def entries(self):
        return list(zip(self.indices, self.values))

    def __len__(self):
        return len(self.indices)

    def max_index(self):
        return self.indices[-1] if self.indices else -1


def parse_libfm_line(text, context=""):
    """Parse one libFM line. `context` (e.g. "train.libfm:12") prefixes errors."""
    where = f"{context}: " if context else ""
    tokens = text.split("#", 1)[0].split()
    if not tokens:
        raise DataFormatError(f"{where}empty line")

    try:
        label = float(tokens[0])
    except ValueError:
        raise DataFormatError(f"{where}label {tokens[0]!r} is not a number") from None

    entries = []
    seen = set()
    for token in tokens[1:]:
        idx_text, sep, value_text = token.partition(":")
        if not sep or not idx_text or not value_text:
            raise DataFormatError(f"{where}malformed token {token!r}")
        try:
            idx = int(idx_text)
        except ValueError:
            raise DataFormatError(
                f"{where}feature index {idx_text!r} is not an integer"
            ) from None
        if idx < 0:
            raise DataFormatError(f"{where}negative feature index {idx}")
        try:
            value = float(value_text)
        except ValueError:
            raise DataFormatError(
                f"{where}value {value_text!r} in {token!r} is not a number"
            ) from None
        if idx in seen:
            raise DataFormatError(f"{where}duplicate index {idx}")
        seen.add(idx)
        entries.append((idx, value))

    return SparseInstance.from_entries(label, entries)


def format_libfm_line(instance):
    parts = [repr(float(instance.label))]
    parts.extend(f"{i}:{float(v)!r}" for i, v in instance.entries)
    return " ".join(parts)


def load_libfm_file(path):
    """Read every instance from a libFM file. Comments and blank lines are skipped."""
    instances = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.split("#", 1)[0].strip():
                continue
            instances.append(parse_libfm_line(line, context=f"{path}:{lineno}"))
    log.info(f"Loaded {len(instances)} instances from {path}")
    return instances


def save_libfm_file(path, instances):
    with open(path, "w", encoding="utf-8") as f:
        for instance in instances:
            f.write(format_libfm_line(instance) + "\n")


def check_indices(instances, num_features):
    """Raise if any instance references a feature outside [0, num_features)."""
    for n, instance in enumerate(instances):
        if instance.max_index() >= num_features:
            raise DataFormatError(
                f"instance {n}: feature index {instance.max_index()} is out of "
                f"range for {num_features} features"
            )


@dataclass
class SparseBatch:
    """A packed mini-batch.

    `nodes` holds the distinct features of the batch in increasing order and
    `X` is the CSR design matrix with columns indexing into `nodes`.
    """

    labels: np.ndarray
    nodes: np.ndarray
    X: sp.csr_matrix

    @classmethod
    def from_instances(cls, instances, num_features):
        check_indices(instances, num_features)
        lengths = np.fromiter((len(x) for x in instances), dtype=np.int64,
                              count=len(instances))
        indptr = np.zeros(len(instances) + 1, dtype=np.int64)
        np.cumsum(lengths, out=indptr[1:])
        flat_idx = np.fromiter(
            (i for x in instances for i in x.indices), dtype=np.int64,
            count=int(indptr[-1]),
        )
        flat_val = np.fromiter(
            (v for x in instances for v in x.values), dtype=np.float64,
            count=int(indptr[-1]),
        )
        nodes, local = np.unique(flat_idx, return_inverse=True)
        X = sp.csr_matrix(
            (flat_val, local.reshape(-1), indptr),
            shape=(len(instances), len(nodes)),
        )
        labels = np.fromiter((x.label for x in instances), dtype=np.float64,
                             count=len(instances))
        return cls(labels=labels, nodes=nodes, X=X)

    def __len__(self):
        return self.X.shape[0]
