"""Mini-batch training with validation-based early stopping."""

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from dataset.libfm import SparseBatch, check_indices
from errors import ConfigError, DataFormatError, DivergenceError, GraphError
from evaluation.metrics import evaluate
from graph.normalize import normalize
from graph.sampling import sample_neighbors
from model.params import init_params
from training.dropout import draw_dropout_mask
from training.early_stopping import EarlyStopping
from training.loss import backward
from training.optimizers import OptimizerState, optimizer_step
from training.train_config import sub_seed

log = logging.getLogger(__name__)


@dataclass
class EpochRecord:
    epoch: int
    train_loss: float
    val_rmse: float
    val_mae: float
    seconds: float

    def format(self):
        return (
            f"epoch={self.epoch} train_loss={self.train_loss!r} "
            f"val_rmse={self.val_rmse!r} val_mae={self.val_mae!r} "
            f"seconds={self.seconds:.3f}"
        )


@dataclass
class RunReport:
    records: list = field(default_factory=list)
    best_epoch: int = 0
    stopped_early: bool = False
    metadata: dict = field(default_factory=dict)
    final: dict = field(default_factory=dict)  # split name -> MetricReport

    def lines(self):
        out = [f"# {key}={value}" for key, value in self.metadata.items()]
        out += [record.format() for record in self.records]
        out.append(f"best_epoch={self.best_epoch} stopped_early={self.stopped_early}")
        out += [f"final split={name} {m.format()}" for name, m in self.final.items()]
        return out

    def save(self, path):
        with open(path, "w", encoding="utf-8") as f:
            f.write("\n".join(self.lines()) + "\n")


def _batches(order, batch_size):
    for start in range(0, len(order), batch_size):
        yield order[start : start + batch_size]


def train(train_set, val_set, space, graph, config):
    """Fit a model and return (parameters of the best validation epoch, RunReport).

    Neighbor sampling is redrawn once per epoch. Validation always uses the
    full graph with dropout off.
    """
    if not train_set or not val_set:
        raise ValueError("training needs non-empty train and validation sets")
    if config.layers >= 1 and graph is None:
        raise ConfigError(f"{config.layers} convolution layer(s) need a feature graph")
    if config.layers == 0 and graph is not None:
        log.info("Plain FM run: the feature graph is not used")
        graph = None

    m, d = space.num_features, config.embedding_dim
    check_indices(train_set, m)
    check_indices(val_set, m)
    empty = next((n for n, x in enumerate(train_set) if len(x) == 0), None)
    if empty is not None:
        raise DataFormatError(f"training instance {empty} has no features")
    if graph is not None and graph.num_nodes != m:
        raise GraphError(f"graph has {graph.num_nodes} nodes, feature space has {m}")

    params = init_params(
        m, d, config.layers, config.activation,
        seed=np.random.default_rng(sub_seed(config.seed, "init")),
        std=config.init_std,
    )
    state = OptimizerState.for_params(config.optimizer, params)
    shuffle_rng = np.random.default_rng(sub_seed(config.seed, "shuffle"))
    sampling_rng = np.random.default_rng(sub_seed(config.seed, "sampling"))
    dropout_rng = np.random.default_rng(sub_seed(config.seed, "dropout"))

    full_norm = normalize(graph) if graph is not None else None
    stopper = EarlyStopping(config.patience)
    report = RunReport(metadata={
        **config.as_dict(),
        "loss_reduction": "sum",
        "eval_sampling_ratio": 1.0,
        "num_features": m,
        "train_instances": len(train_set),
        "val_instances": len(val_set),
    })

    kind = "GEM" if config.layers else "FM"
    log.info(f"Training {kind} model: m={m} d={d} L={config.layers}")
    for epoch in range(1, config.max_epochs + 1):
        started = time.perf_counter()
        norm = full_norm
        if graph is not None and config.sampling_ratio < 1.0:
            norm = normalize(sample_neighbors(graph, config.sampling_ratio, sampling_rng))

        epoch_loss = 0.0
        order = shuffle_rng.permutation(len(train_set))
        for n_batch, rows in enumerate(_batches(order, config.batch_size), start=1):
            batch = SparseBatch.from_instances([train_set[k] for k in rows], m)
            dropout_mask = None
            if config.dropout_ratio > 0:
                dropout_mask = draw_dropout_mask(
                    (len(batch.nodes), d), config.dropout_ratio, dropout_rng
                )
            interaction_mask = None
            if config.interaction_dropout > 0:
                interaction_mask = draw_dropout_mask(
                    (len(batch), d), config.interaction_dropout, dropout_rng
                )

            grads = backward(
                batch, params, norm, dropout_mask, config.l2_lambda,
                interaction_mask=interaction_mask,
                regularize_bias=config.regularize_bias,
                full_decay=config.full_decay,
            )
            batch_loss = grads.data_loss + config.l2_lambda * params.squared_norm(
                include_bias=config.regularize_bias
            )
            if not np.isfinite(batch_loss):
                log.warning(f"Non-finite loss at epoch {epoch}, batch {n_batch}")
                raise DivergenceError(
                    f"loss became {batch_loss} at epoch {epoch}, batch {n_batch}"
                )
            optimizer_step(params, state, grads, config)
            epoch_loss += batch_loss

        val = evaluate(val_set, params, full_norm, threads=config.threads)
        if not (np.isfinite(val.rmse) and np.isfinite(val.mae)):
            raise DivergenceError(f"validation metrics became non-finite at epoch {epoch}")
        record = EpochRecord(epoch, epoch_loss, val.rmse, val.mae,
                             time.perf_counter() - started)
        report.records.append(record)
        log.info(
            f"Epoch {epoch}: train loss {epoch_loss:.4f}, "
            f"val rmse {val.rmse:.4f}, val mae {val.mae:.4f} ({record.seconds:.1f}s)"
        )

        monitored = val.rmse if config.metric_for_stopping == "rmse" else val.mae
        if stopper(monitored, epoch, params):
            report.stopped_early = True
            break

    report.best_epoch = stopper.best_valid_epoch
    log.info(f"Training finished, best epoch {report.best_epoch}")
    return stopper.best_params, report
