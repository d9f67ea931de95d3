"""Squared loss with L2 regularization and its analytic gradients.

    loss = sum_batch (y_hat - y)^2 + lambda * ||Theta||^2

The loss is summed, not averaged, over the batch.
"""

from dataclasses import dataclass, field

import numpy as np

from model.gcn import embed
from model.params import activation_grad
from model.scoring import batch_linear, interaction_terms


@dataclass
class GradientSet:
    """Gradients of the loss.

    w and W1 gradients are row-sparse: `d_w[k]` belongs to feature
    `w_rows[k]` and `d_W1[k]` to W1 row `embedding_rows[k]`. Rows not listed
    have exactly zero gradient. `d_W_deep` holds dense d x d gradients of W2..WL.
    """

    d_w0: float
    w_rows: np.ndarray
    d_w: np.ndarray
    embedding_rows: np.ndarray
    d_W1: np.ndarray
    d_W_deep: list = field(default_factory=list)
    data_loss: float = 0.0

    def dense(self, params):
        """Full-size arrays (w0, w, [W1, W2, ...]) for comparisons."""
        d_w = np.zeros_like(params.w)
        d_w[self.w_rows] = self.d_w
        d_W1 = np.zeros_like(params.W[0])
        d_W1[self.embedding_rows] = self.d_W1
        return self.d_w0, d_w, [d_W1] + list(self.d_W_deep)


@dataclass
class ForwardPass:
    view: object
    embeddings: np.ndarray  # rows after embedding dropout
    s: np.ndarray
    predictions: np.ndarray


def forward(batch, params, norm, dropout_mask=None, interaction_mask=None):
    view = embed(params, norm, batch.nodes)
    E = view.rows if dropout_mask is None else view.rows * dropout_mask
    s, _, pairwise = interaction_terms(batch.X, E)
    if interaction_mask is not None:
        pairwise = pairwise * interaction_mask
    predictions = batch_linear(batch, params) + pairwise.sum(axis=1)
    return ForwardPass(view=view, embeddings=E, s=s, predictions=predictions)


def loss(batch, params, norm, l2_lambda, dropout_mask=None, interaction_mask=None,
         regularize_bias=True):
    """Summed squared error plus lambda * ||Theta||^2 over all parameters."""
    if len(batch) == 0:
        raise ValueError("loss needs a non-empty batch")
    result = forward(batch, params, norm, dropout_mask, interaction_mask)
    residual = result.predictions - batch.labels
    penalty = l2_lambda * params.squared_norm(include_bias=regularize_bias)
    return float(residual @ residual) + penalty


def _conv_backward(view, params, d_rows):
    """Route gradients of the final embedding rows back to W1 rows and W2..WL."""
    grad = d_rows
    d_deep = [None] * (params.layers - 1)
    for l in range(params.layers, 1, -1):
        layer = view.layer_cache[l - 1]
        d_z = grad * activation_grad(layer.pre_activation, params.activation)
        d_deep[l - 2] = layer.propagated.T @ d_z
        grad = layer.block.T @ (d_z @ params.W[l - 1].T)

    first = view.layer_cache[0]
    d_z = grad * activation_grad(first.pre_activation, params.activation)
    return first.block.T @ d_z, d_deep


def backward(batch, params, norm, dropout_mask, l2_lambda, interaction_mask=None,
             regularize_bias=True, full_decay=False):
    """Gradient of `loss` for the same masks.

    With full_decay=False the L2 term only reaches w / W1 rows touched by the
    batch (plus w0 and the dense deep layers); full_decay=True regularizes
    every row, matching `loss` exactly.
    """
    result = forward(batch, params, norm, dropout_mask, interaction_mask)
    residual = result.predictions - batch.labels
    r = 2.0 * residual
    X = batch.X

    d_w0 = float(r.sum())
    d_w = X.T @ r

    # d/dE of 1/2 sum_f k_bf (s_bf^2 - q_bf), k the interaction mask
    rk = r[:, None] if interaction_mask is None else r[:, None] * interaction_mask
    X2 = X.multiply(X)
    d_E = X.T @ (rk * result.s) - (X2.T @ rk) * result.embeddings
    if dropout_mask is not None:
        d_E = d_E * dropout_mask

    if params.uses_graph:
        d_W1, d_deep = _conv_backward(result.view, params, d_E)
        embedding_rows = result.view.input_rows
    else:
        d_W1, d_deep = d_E, []
        embedding_rows = batch.nodes
    w_rows = batch.nodes

    decay = 2.0 * l2_lambda
    if decay:
        if full_decay:
            d_w = _scatter(d_w, w_rows, params.num_features)
            d_W1 = _scatter(d_W1, embedding_rows, params.num_features)
            w_rows = embedding_rows = np.arange(params.num_features)
        if regularize_bias:
            d_w0 += decay * params.w0
            d_w = d_w + decay * params.w[w_rows]
        d_W1 = d_W1 + decay * params.W[0][embedding_rows]
        d_deep = [dW + decay * params.W[l] for l, dW in enumerate(d_deep, start=1)]

    return GradientSet(
        d_w0=d_w0,
        w_rows=w_rows,
        d_w=np.asarray(d_w, dtype=np.float64),
        embedding_rows=embedding_rows,
        d_W1=np.asarray(d_W1, dtype=np.float64),
        d_W_deep=d_deep,
        data_loss=float(residual @ residual),
    )


def _scatter(rows_grad, rows, size):
    full = np.zeros((size,) + rows_grad.shape[1:])
    full[rows] = rows_grad
    return full
