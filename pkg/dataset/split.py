import logging
import math
from dataclasses import dataclass

import numpy as np

from errors import DataFormatError

log = logging.getLogger(__name__)


@dataclass
class DatasetSplit:
    train: list
    validation: list
    test: list

    def sizes(self):
        return len(self.train), len(self.validation), len(self.test)


def split_sizes(n, ratios):
    """Largest-remainder rounding; ties go to the earlier part (train first)."""
    exact = [n * r for r in ratios]
    sizes = [math.floor(x) for x in exact]
    leftover = n - sum(sizes)
    order = sorted(range(len(ratios)), key=lambda k: (-(exact[k] - sizes[k]), k))
    for k in order[:leftover]:
        sizes[k] += 1
    return sizes


def split_dataset(instances, ratios, seed):
    """Shuffle with `seed`, then cut into train / validation / test."""
    if not instances:
        raise DataFormatError("cannot split an empty dataset")
    if len(ratios) != 3 or any(r <= 0 for r in ratios):
        raise DataFormatError(f"split ratios must be three positive numbers, got {ratios}")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise DataFormatError(f"split ratios must sum to 1, got {sum(ratios)}")

    n_train, n_val, _ = split_sizes(len(instances), ratios)
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(instances))
    shuffled = [instances[k] for k in order]

    split = DatasetSplit(
        train=shuffled[:n_train],
        validation=shuffled[n_train : n_train + n_val],
        test=shuffled[n_train + n_val :],
    )
    n_train, n_val, n_test = split.sizes()
    log.info(f"Split {len(instances)} instances into {n_train}/{n_val}/{n_test}")
    return split
