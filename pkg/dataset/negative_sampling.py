import logging
from collections import defaultdict

import numpy as np

from dataset.libfm import SparseInstance
from errors import DataFormatError

log = logging.getLogger(__name__)


def _split_item(instance, item_start, item_end):
    """Return (context entries, (item index, item value)) for one positive."""
    context, items = [], []
    for idx, value in instance.entries:
        if item_start <= idx < item_end:
            items.append((idx, value))
        else:
            context.append((idx, value))
    if len(items) != 1:
        raise DataFormatError(
            f"expected exactly one active item feature, found {len(items)}"
        )
    return tuple(context), items[0]


def negative_sample(positives, space, item_field, k, seed, negative_label=0.0):
    """Draw `k` negatives per positive from items never clicked under its context.

    The context of a positive is its full set of non-item entries. Every
    negative copies that context and swaps in one uniformly drawn item.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")

    field = space.field_id(item_field)
    item_start, item_end = space.field_range(field)
    vocabulary = space.features_of(field)

    parsed = [_split_item(p, item_start, item_end) for p in positives]
    clicked = defaultdict(set)
    for context, (item, _) in parsed:
        clicked[context].add(item)

    rng = np.random.default_rng(seed)
    eligible_by_context = {}
    negatives = []
    short = 0
    for context, (_, item_value) in parsed:
        eligible = eligible_by_context.get(context)
        if eligible is None:
            eligible = vocabulary[~np.isin(vocabulary, sorted(clicked[context]))]
            eligible_by_context[context] = eligible
        take = min(k, len(eligible))
        if take < k:
            short += 1
        if take == 0:
            continue
        for item in rng.choice(eligible, size=take, replace=False):
            negatives.append(
                SparseInstance.from_entries(
                    negative_label, list(context) + [(int(item), item_value)]
                )
            )

    if short:
        log.warning(
            f"{short} of {len(positives)} positives had fewer than {k} "
            f"unclicked items under their context"
        )
    log.info(f"Sampled {len(negatives)} negatives for {len(positives)} positives")
    return negatives
