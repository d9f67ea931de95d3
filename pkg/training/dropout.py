import numpy as np


def draw_dropout_mask(shape, ratio, rng):
    """Inverted-dropout mask: 0 with probability `ratio`, else 1 / (1 - ratio)."""
    if not 0.0 <= ratio < 1.0:
        raise ValueError(f"dropout ratio must be in [0, 1), got {ratio}")
    if ratio == 0.0:
        return np.ones(shape)
    return (rng.random(shape) >= ratio) / (1.0 - ratio)


def apply_dropout(view, ratio, seed):
    """Drop post-convolution embedding coordinates; returns (new view, mask)."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    mask = draw_dropout_mask(view.rows.shape, ratio, rng)
    return view.with_rows(view.rows * mask), mask
