"""Effective configuration of one command.

Precedence: config.py defaults < config file (flat YAML mapping) < CLI flags.
"""

from dataclasses import asdict, dataclass, field, fields

import yaml

import config
from errors import ConfigError
from graph.feature_graph import GRAPH_MODES
from training.train_config import TrainConfig


def _as_list(value):
    if value is None:
        return None
    if isinstance(value, str):
        return [part.strip() for part in value.split(",") if part.strip()]
    return list(value)


def _as_pairs(value):
    pairs = []
    for item in _as_list(value) or []:
        parts = item.split(":") if isinstance(item, str) else list(item)
        if len(parts) != 2:
            raise ConfigError(f"field pair must look like 'a:b', got {item!r}")
        pairs.append(tuple(parts))
    return pairs


@dataclass
class RunConfig:
    # data
    data: str = None
    split: tuple = config.Data_Config.SPLIT_RATIOS
    train_data: str = None
    valid_data: str = None
    test_data: str = None
    field_map: str = None
    item_field: str = None
    negatives_per_positive: int = config.Data_Config.NEGATIVES_PER_POSITIVE
    negative_label: float = config.Data_Config.NEGATIVE_LABEL

    # graph
    graph: str = None
    graph_mode: str = config.Graph_Config.MODE
    graph_fields: list = None
    field_pairs: list = field(default_factory=list)
    low_cardinality_threshold: int = config.Graph_Config.LOW_CARDINALITY_THRESHOLD

    # outputs
    model: str = config.Run_Config.MODEL_PATH
    report: str = None
    out: str = None
    clip_predictions: bool = False

    # training (mirrors TrainConfig)
    optimizer: str = config.Train_Config.OPTIMIZER
    learning_rate: float = config.Train_Config.LEARNING_RATE
    l2_lambda: float = config.Train_Config.L2_LAMBDA
    dropout_ratio: float = config.Train_Config.DROPOUT_RATIO
    interaction_dropout: float = config.Train_Config.INTERACTION_DROPOUT
    batch_size: int = config.Train_Config.BATCH_SIZE
    max_epochs: int = config.Train_Config.MAX_EPOCHS
    patience: int = config.Train_Config.PATIENCE
    sampling_ratio: float = config.Train_Config.SAMPLING_RATIO
    seed: int = config.Train_Config.SEED
    metric_for_stopping: str = config.Train_Config.METRIC_FOR_STOPPING
    regularize_bias: bool = config.Train_Config.REGULARIZE_BIAS
    full_decay: bool = config.Train_Config.FULL_DECAY
    embedding_dim: int = config.Model_Config.EMBEDDING_DIM
    layers: int = config.Model_Config.LAYERS
    activation: str = config.Model_Config.ACTIVATION
    init_std: float = config.Model_Config.INIT_STD
    threads: int = config.Run_Config.THREADS

    def __post_init__(self):
        # YAML reads "1e-5" as a string
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None or f.type not in (int, float):
                continue
            try:
                number = f.type(value)
            except (TypeError, ValueError, OverflowError):
                raise ConfigError(f"{f.name} must be a number, got {value!r}") from None
            if f.type is int and isinstance(value, float) and value != number:
                raise ConfigError(f"{f.name} must be a whole number, got {value!r}")
            setattr(self, f.name, number)
        split = _as_list(self.split)
        try:
            self.split = tuple(float(r) for r in split)
        except (TypeError, ValueError):
            raise ConfigError(f"split must be three numbers, got {self.split!r}") from None
        self.graph_fields = _as_list(self.graph_fields)
        self.field_pairs = _as_pairs(self.field_pairs)
        if self.graph_mode not in GRAPH_MODES:
            raise ConfigError(f"graph_mode must be one of {GRAPH_MODES}, got {self.graph_mode!r}")
        self.train_config()  # validates the training fields

    def train_config(self):
        names = {f.name for f in fields(TrainConfig)}
        return TrainConfig(**{name: getattr(self, name) for name in names})

    def as_dict(self):
        return asdict(self)

    @property
    def has_graph_settings(self):
        return bool(self.graph or self.graph_fields or self.field_pairs)

    def check_data_sources(self):
        """Exactly one of {single file + split ratios, pre-split files}."""
        presplit = self.train_data or self.valid_data or self.test_data
        if self.data and presplit:
            raise ConfigError("give either --data with split ratios or pre-split files, not both")
        if not self.data and not presplit:
            raise ConfigError("no data given: set --data or --train-data/--valid-data")
        if presplit and not (self.train_data and self.valid_data):
            raise ConfigError("pre-split runs need both train_data and valid_data")

    def check_for_training(self):
        self.check_data_sources()
        if self.layers >= 1 and not self.has_graph_settings:
            raise ConfigError(
                f"layers={self.layers} needs a graph: set --graph or graph fields/pairs"
            )
        if (self.graph_fields or self.field_pairs) and not self.graph and not self.field_map:
            raise ConfigError("building a graph from fields needs --field-map")


def load_run_config(path=None, overrides=None):
    values = {}
    if path:
        try:
            with open(path, encoding="utf-8") as f:
                loaded = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigError(f"{path}: invalid YAML: {e}") from None
        if loaded is None:
            loaded = {}
        if not isinstance(loaded, dict):
            raise ConfigError(f"{path}: expected a flat key: value mapping")
        values.update(loaded)
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})

    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    for key, value in values.items():
        if isinstance(value, dict):
            raise ConfigError(f"config key {key!r} must be a plain value, not a mapping")
    try:
        return RunConfig(**values)
    except TypeError as e:
        raise ConfigError(str(e)) from None
