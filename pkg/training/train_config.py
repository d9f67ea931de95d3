from dataclasses import asdict, dataclass

import config
from errors import ConfigError
from model.params import ACTIVATIONS

OPTIMIZERS = ("adagrad", "adam")
STOPPING_METRICS = ("rmse", "mae")

# Named sub-seeds: every random stream derives from (seed, stream id).
SUBSEEDS = {"split": 0, "init": 1, "shuffle": 2, "sampling": 3, "dropout": 4, "negatives": 5}


def sub_seed(seed, name):
    return [int(seed), SUBSEEDS[name]]


@dataclass
class TrainConfig:
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
        if self.optimizer not in OPTIMIZERS:
            raise ConfigError(f"optimizer must be one of {OPTIMIZERS}, got {self.optimizer!r}")
        if not self.learning_rate > 0:
            raise ConfigError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.l2_lambda < 0:
            raise ConfigError(f"l2_lambda must be >= 0, got {self.l2_lambda}")
        for name in ("dropout_ratio", "interaction_dropout"):
            value = getattr(self, name)
            if not 0.0 <= value < 1.0:
                raise ConfigError(f"{name} must be in [0, 1), got {value}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.max_epochs < 1:
            raise ConfigError(f"max_epochs must be >= 1, got {self.max_epochs}")
        if self.patience < 1:
            raise ConfigError(f"patience must be >= 1, got {self.patience}")
        if not 0.0 <= self.sampling_ratio <= 1.0:
            raise ConfigError(f"sampling_ratio must be in [0, 1], got {self.sampling_ratio}")
        if self.metric_for_stopping not in STOPPING_METRICS:
            raise ConfigError(
                f"metric_for_stopping must be one of {STOPPING_METRICS}, "
                f"got {self.metric_for_stopping!r}"
            )
        if self.embedding_dim < 1:
            raise ConfigError(f"embedding_dim must be >= 1, got {self.embedding_dim}")
        if self.layers < 0:
            raise ConfigError(f"layers must be >= 0, got {self.layers}")
        if self.activation not in ACTIVATIONS:
            raise ConfigError(f"activation must be one of {ACTIVATIONS}, got {self.activation!r}")
        if self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")

    def as_dict(self):
        return asdict(self)
