"""Adagrad and Adam with sparse row updates.

Parameters are addressed as slots: "w0", "w", "W1", "W2", ... Row-sparse
gradients (w, W1) only touch the listed rows; untouched rows keep both their
values and their accumulators.
"""

from dataclasses import dataclass, field

import numpy as np

EPS = 1e-8
BETA1 = 0.9
BETA2 = 0.999


def _slots(params):
    slots = {"w0": np.array([params.w0], dtype=np.float64), "w": params.w}
    for l, Wl in enumerate(params.W, start=1):
        slots[f"W{l}"] = Wl
    return slots


@dataclass
class OptimizerState:
    kind: str
    step: int = 0
    first: dict = field(default_factory=dict)  # adagrad: sum of g^2; adam: m
    second: dict = field(default_factory=dict)  # adam: v

    @classmethod
    def for_params(cls, kind, params):
        state = cls(kind=kind)
        for name, value in _slots(params).items():
            state.first[name] = np.zeros_like(value)
            if kind == "adam":
                state.second[name] = np.zeros_like(value)
        return state


def _update(state, name, value, rows, grad, lr):
    """In-place update of value[rows] (rows=None means the whole slot)."""
    sel = slice(None) if rows is None else rows
    if state.kind == "adagrad":
        acc = state.first[name]
        acc[sel] += grad * grad
        value[sel] -= lr * grad / np.sqrt(acc[sel] + EPS)
    elif state.kind == "adam":
        m, v = state.first[name], state.second[name]
        m[sel] = BETA1 * m[sel] + (1.0 - BETA1) * grad
        v[sel] = BETA2 * v[sel] + (1.0 - BETA2) * grad * grad
        m_hat = m[sel] / (1.0 - BETA1**state.step)
        v_hat = v[sel] / (1.0 - BETA2**state.step)
        value[sel] -= lr * m_hat / (np.sqrt(v_hat) + EPS)
    else:
        raise ValueError(f"unknown optimizer {state.kind!r}")


def optimizer_step(params, state, grads, config):
    """Apply one update; params and state are modified in place and returned."""
    lr = config.learning_rate
    state.step += 1

    w0 = np.array([params.w0], dtype=np.float64)
    _update(state, "w0", w0, None, np.array([grads.d_w0]), lr)
    params.w0 = float(w0[0])

    if len(grads.w_rows):
        _update(state, "w", params.w, grads.w_rows, grads.d_w, lr)
    if len(grads.embedding_rows):
        _update(state, "W1", params.W[0], grads.embedding_rows, grads.d_W1, lr)
    for l, dW in enumerate(grads.d_W_deep, start=2):
        _update(state, f"W{l}", params.W[l - 1], None, dW, lr)
    return params, state
