"""Central finite-difference check of the analytic gradients."""

import logging
from dataclasses import dataclass, field

import numpy as np

from training.loss import backward, loss

log = logging.getLogger(__name__)


@dataclass
class GradientCheckResult:
    analytic: dict = field(default_factory=dict)
    numeric: dict = field(default_factory=dict)

    def relative_errors(self, floor=1e-6):
        errors = {}
        for name, a in self.analytic.items():
            n = self.numeric[name]
            scale = np.maximum(np.maximum(np.abs(a), np.abs(n)), floor)
            errors[name] = np.abs(a - n) / scale
        return errors

    def max_relative_error(self, floor=1e-6):
        return max(float(e.max(initial=0.0)) for e in self.relative_errors(floor).values())

    def passed(self, rtol=1e-4, atol=1e-6):
        """|analytic - numeric| <= max(rtol * magnitude, atol) on every coordinate."""
        return self.max_relative_error(floor=atol / rtol) <= rtol


def _arrays(params):
    """(name, array) for every parameter array; w0 is a scalar and handled apart."""
    return [("w", params.w)] + [(f"W{l}", Wl) for l, Wl in enumerate(params.W, start=1)]


def gradient_check(batch, params, norm, l2_lambda, dropout_mask=None,
                   interaction_mask=None, regularize_bias=True, h=1e-5):
    """Compare `backward` against central differences of `loss` on every coordinate.

    `params` is perturbed in place and restored. Regularization is applied to
    every row on both sides so the two are comparable.
    """
    grads = backward(batch, params, norm, dropout_mask, l2_lambda,
                     interaction_mask=interaction_mask,
                     regularize_bias=regularize_bias, full_decay=True)
    d_w0, d_w, d_W = grads.dense(params)

    def objective():
        return loss(batch, params, norm, l2_lambda, dropout_mask, interaction_mask,
                    regularize_bias=regularize_bias)

    result = GradientCheckResult()
    result.analytic["w0"] = np.array([d_w0])
    result.analytic["w"] = d_w
    for l, dW in enumerate(d_W, start=1):
        result.analytic[f"W{l}"] = dW

    original = params.w0
    params.w0 = original + h
    plus = objective()
    params.w0 = original - h
    minus = objective()
    params.w0 = original
    result.numeric["w0"] = np.array([(plus - minus) / (2 * h)])

    for name, array in _arrays(params):
        numeric = np.zeros_like(array)
        flat, out = array.reshape(-1), numeric.reshape(-1)
        for k in range(flat.size):
            saved = flat[k]
            flat[k] = saved + h
            plus = objective()
            flat[k] = saved - h
            minus = objective()
            flat[k] = saved
            out[k] = (plus - minus) / (2 * h)
        result.numeric[name] = numeric

    log.debug(f"Gradient check max relative error {result.max_relative_error():.3e}")
    return result
