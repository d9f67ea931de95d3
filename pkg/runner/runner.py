import logging

import click
import numpy as np

import config

from dataset.field_map import FeatureSpace, load_field_map
from dataset.libfm import check_indices, load_libfm_file, save_libfm_file
from dataset.negative_sampling import negative_sample
from dataset.split import DatasetSplit, split_dataset
from errors import ConfigError, DataFormatError
from evaluation.metrics import count_params, evaluate
from graph.feature_graph import (
    PAIR_LIST,
    build_graph,
    degree_histogram,
    load_graph,
    low_cardinality_fields,
    save_graph,
)
from graph.normalize import normalize
from model.checkpoint import load_checkpoint, save_checkpoint
from model.scoring import predict_batch
from training.train_config import sub_seed
from training.trainer import train

log = logging.getLogger(__name__)


class Runner:
    """Wires data, graph, model, training and evaluation into one command run."""

    def __init__(self, run_config):
        self.config = run_config
        self.output = []

    def echo(self, line):
        self.output.append(line)
        click.echo(line)

    def write_report(self):
        if not self.config.report:
            return
        lines = [f"# {key}={value}" for key, value in self.config.as_dict().items()]
        lines += self.output
        with open(self.config.report, "w", encoding="utf-8") as f:
            f.write("\n".join(lines) + "\n")
        log.info(f"Report written to {self.config.report}")

    # -- data -------------------------------------------------------------

    def load_splits(self):
        cfg = self.config
        cfg.check_data_sources()
        if cfg.data:
            instances = load_libfm_file(cfg.data)
            if not instances:
                raise DataFormatError(f"{cfg.data}: no instances")
            return split_dataset(instances, cfg.split, sub_seed(cfg.seed, "split"))

        split = DatasetSplit(
            train=load_libfm_file(cfg.train_data),
            validation=load_libfm_file(cfg.valid_data),
            test=load_libfm_file(cfg.test_data) if cfg.test_data else [],
        )
        if not split.train:
            raise DataFormatError(f"{cfg.train_data}: no instances")
        return split

    def load_space(self, split):
        if self.config.field_map:
            return load_field_map(self.config.field_map)
        largest = max(
            (x.max_index() for part in (split.train, split.validation, split.test) for x in part),
            default=-1,
        )
        if largest < 0:
            raise DataFormatError("cannot infer the number of features from empty data")
        log.info(f"No field map given, using one field of {largest + 1} features")
        return FeatureSpace.single_field(largest + 1)

    # -- graph ------------------------------------------------------------

    def make_graph(self, instances, space):
        cfg = self.config
        graph = build_graph(
            instances, space, mode=cfg.graph_mode,
            included_fields=cfg.graph_fields if cfg.graph_mode != PAIR_LIST else None,
            field_pairs=cfg.field_pairs or None,
            low_cardinality_threshold=cfg.low_cardinality_threshold,
        )
        for f in low_cardinality_fields(space, graph.included_fields,
                                        cfg.low_cardinality_threshold):
            self.echo(
                f"warning: field {space.field_names[f]} has only "
                f"{space.cardinality(f)} features"
            )
        return graph

    def load_graph_instances(self):
        """A pre-split train file as-is, or the train split of --data."""
        cfg = self.config
        if cfg.train_data:
            if cfg.data:
                raise ConfigError("give either --data or --train-data, not both")
            instances = load_libfm_file(cfg.train_data)
            if not instances:
                raise DataFormatError(f"{cfg.train_data}: no instances")
            return instances
        return self.load_splits().train

    def build_graph(self):
        """Build the co-occurrence graph from the training data and save it."""
        cfg = self.config
        if not cfg.field_map:
            raise ConfigError("build-graph needs --field-map")
        instances = self.load_graph_instances()
        space = load_field_map(cfg.field_map)
        check_indices(instances, space.num_features)

        graph = self.make_graph(instances, space)
        path = cfg.out or cfg.graph or config.Run_Config.GRAPH_PATH
        save_graph(path, graph)

        self.echo(f"nodes={graph.num_nodes} edges={graph.num_edges}")
        for low, high, count in degree_histogram(graph):
            label = f"{low}" if low == high else f"{low}-{high}"
            self.echo(f"degree {label}: {count}")
        self.echo(f"graph written to {path}")
        self.write_report()
        return graph

    # -- training ---------------------------------------------------------

    def train(self):
        cfg = self.config
        cfg.check_for_training()
        split = self.load_splits()
        space = self.load_space(split)

        graph = None
        if cfg.layers >= 1:
            if cfg.graph and not (cfg.graph_fields or cfg.field_pairs):
                graph = load_graph(cfg.graph)
                if graph.num_nodes != space.num_features:
                    raise ConfigError(
                        f"graph {cfg.graph} has {graph.num_nodes} nodes but the data "
                        f"has {space.num_features} features"
                    )
                if cfg.field_map:
                    graph.check_fields(space)
            else:
                graph = self.make_graph(split.train, space)
                if cfg.graph:
                    save_graph(cfg.graph, graph)

        params, report = train(split.train, split.validation, space, graph,
                               cfg.train_config())

        norm = normalize(graph) if graph is not None else None
        parts = [("train", split.train), ("validation", split.validation), ("test", split.test)]
        for name, instances in parts:
            if instances:
                report.final[name] = evaluate(instances, params, norm,
                                              clip=cfg.clip_predictions, threads=cfg.threads)

        save_checkpoint(cfg.model, params, graph)
        report.metadata.update({f"run.{k}": v for k, v in cfg.as_dict().items()})
        report.save(cfg.report or config.Run_Config.REPORT_PATH)

        for name in ("validation", "test"):
            if name in report.final:
                self.echo(f"{name} {report.final[name].format()}")
        return params, report

    # -- scoring ----------------------------------------------------------

    def _load_scoring_inputs(self):
        cfg = self.config
        if not cfg.data:
            raise ConfigError("--data is required")
        params, graph = load_checkpoint(cfg.model)
        instances = load_libfm_file(cfg.data)
        check_indices(instances, params.num_features)
        norm = normalize(graph) if graph is not None else None
        return params, norm, instances

    def evaluate(self):
        params, norm, instances = self._load_scoring_inputs()
        if not instances:
            raise DataFormatError(f"{self.config.data}: no instances to evaluate")
        metrics = evaluate(instances, params, norm, clip=self.config.clip_predictions,
                           threads=self.config.threads)
        self.echo(metrics.format())
        self.write_report()
        return metrics

    def predict(self):
        cfg = self.config
        params, norm, instances = self._load_scoring_inputs()
        predictions = predict_batch(instances, norm, params, threads=cfg.threads)
        if cfg.clip_predictions:
            predictions = np.clip(predictions, 0.0, 1.0)
        path = cfg.out or config.Run_Config.PREDICTIONS_PATH
        with open(path, "w", encoding="utf-8") as f:
            for p in predictions:
                f.write(np.format_float_positional(p, trim="-") + "\n")
        self.echo(f"{len(predictions)} predictions written to {path} "
                  f"(model params={count_params(params)})")
        self.write_report()
        return predictions

    # -- preprocessing ----------------------------------------------------

    def negative_sample(self):
        cfg = self.config
        if not (cfg.data and cfg.field_map and cfg.item_field and cfg.out):
            raise ConfigError("negative-sample needs --data, --field-map, --item-field and --out")
        positives = load_libfm_file(cfg.data)
        space = load_field_map(cfg.field_map)
        check_indices(positives, space.num_features)
        negatives = negative_sample(
            positives, space, cfg.item_field, cfg.negatives_per_positive,
            seed=sub_seed(cfg.seed, "negatives"), negative_label=cfg.negative_label,
        )
        save_libfm_file(cfg.out, positives + negatives)
        self.echo(f"positives={len(positives)} negatives={len(negatives)} written to {cfg.out}")
        self.write_report()
        return negatives
