import logging
from dataclasses import dataclass

import numpy as np

from errors import FieldMapError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FeatureSpace:
    """Global feature index <-> field mapping.

    Fields own contiguous index ranges `[start, end)` listed in order.
    """

    num_features: int
    field_names: tuple
    field_starts: tuple

    def __post_init__(self):
        if not self.field_names:
            raise FieldMapError("a feature space needs at least one field")
        if len(set(self.field_names)) != len(self.field_names):
            raise FieldMapError("field names must be unique")
        bounds = list(self.field_starts) + [self.num_features]
        if bounds[0] != 0:
            raise FieldMapError(f"first field must start at 0, got {bounds[0]}")
        for name, start, end in zip(self.field_names, bounds, bounds[1:]):
            if end <= start:
                raise FieldMapError(f"field {name!r} has no features ({start}..{end})")

    @classmethod
    def single_field(cls, num_features, name="all"):
        return cls(num_features, (name,), (0,))

    @property
    def num_fields(self):
        return len(self.field_names)

    @property
    def field_of(self):
        """Array mapping every feature index to its field id."""
        counts = [self.cardinality(f) for f in range(self.num_fields)]
        return np.repeat(np.arange(self.num_fields), counts)

    def field_range(self, field):
        start = self.field_starts[field]
        end = (
            self.field_starts[field + 1]
            if field + 1 < self.num_fields
            else self.num_features
        )
        return start, end

    def cardinality(self, field):
        start, end = self.field_range(field)
        return end - start

    def features_of(self, field):
        return np.arange(*self.field_range(field))

    def field_id(self, name_or_id):
        """Resolve a field name (or an integer id, returned as-is) to an id."""
        if isinstance(name_or_id, (int, np.integer)):
            if not 0 <= name_or_id < self.num_fields:
                raise FieldMapError(f"field id {name_or_id} out of range")
            return int(name_or_id)
        try:
            return self.field_names.index(name_or_id)
        except ValueError:
            raise FieldMapError(
                f"unknown field {name_or_id!r}; known fields: "
                f"{', '.join(self.field_names)}"
            ) from None

    def field_of_feature(self, index):
        if not 0 <= index < self.num_features:
            raise FieldMapError(f"feature index {index} out of range")
        return int(np.searchsorted(self.field_starts, index, side="right") - 1)


def parse_field_map(lines, source="<field map>"):
    """Parse `name<TAB>start<TAB>end` lines (end exclusive) into a FeatureSpace."""
    names, ranges = [], []
    for lineno, line in enumerate(lines, start=1):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise FieldMapError(
                f"{source}:{lineno}: expected 'name<TAB>start<TAB>end', got {line!r}"
            )
        name = parts[0]
        try:
            start, end = int(parts[1]), int(parts[2])
        except ValueError:
            raise FieldMapError(f"{source}:{lineno}: bounds must be integers") from None
        if end <= start:
            raise FieldMapError(f"{source}:{lineno}: field {name!r} is empty")
        if ranges:
            prev_end = ranges[-1][1]
            if start < prev_end:
                raise FieldMapError(
                    f"{source}:{lineno}: field {name!r} overlaps or is out of "
                    f"order (starts at {start}, previous field ends at {prev_end})"
                )
            if start > prev_end:
                raise FieldMapError(
                    f"{source}:{lineno}: gap between {prev_end} and {start}"
                )
        elif start != 0:
            raise FieldMapError(f"{source}:{lineno}: first field must start at 0")
        names.append(name)
        ranges.append((start, end))

    if not names:
        raise FieldMapError(f"{source}: no fields defined")
    return FeatureSpace(
        num_features=ranges[-1][1],
        field_names=tuple(names),
        field_starts=tuple(start for start, _ in ranges),
    )


def load_field_map(path):
    with open(path, encoding="utf-8") as f:
        space = parse_field_map(f, source=str(path))
    log.info(f"Field map {path}: {space.num_fields} fields, {space.num_features} features")
    return space
