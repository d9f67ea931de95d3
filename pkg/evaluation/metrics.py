import logging
from dataclasses import dataclass

import numpy as np

from model.scoring import predict_batch

log = logging.getLogger(__name__)


def _checked(predictions, labels):
    p = np.asarray(predictions, dtype=np.float64).reshape(-1)
    y = np.asarray(labels, dtype=np.float64).reshape(-1)
    if len(p) != len(y):
        raise ValueError(f"{len(p)} predictions for {len(y)} labels")
    if len(p) == 0:
        raise ValueError("metrics need at least one prediction")
    return p, y


def rmse(predictions, labels):
    p, y = _checked(predictions, labels)
    return float(np.sqrt(np.mean((p - y) ** 2)))


def mae(predictions, labels):
    p, y = _checked(predictions, labels)
    return float(np.mean(np.abs(p - y)))


def count_params(params):
    """1 + m + m*d + (L-1)*d^2: one convolution layer adds nothing over FM."""
    m, d = params.num_features, params.dim
    return 1 + m + m * d + max(0, params.layers - 1) * d * d


@dataclass
class MetricReport:
    rmse: float
    mae: float
    n: int
    param_count: int

    def format(self):
        return f"rmse={self.rmse:.6f} mae={self.mae:.6f} n={self.n} params={self.param_count}"


def evaluate(instances, params, norm=None, clip=False, threads=1):
    """RMSE / MAE of the model on `instances`; clip=True clips predictions to [0, 1]."""
    predictions = predict_batch(instances, norm, params, threads=threads)
    if clip:
        predictions = np.clip(predictions, 0.0, 1.0)
    labels = [x.label for x in instances]
    return MetricReport(
        rmse=rmse(predictions, labels),
        mae=mae(predictions, labels),
        n=len(instances),
        param_count=count_params(params),
    )
