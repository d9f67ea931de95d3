from dataclasses import dataclass, field

import numpy as np

IDENTITY = "identity"
RELU = "relu"
ACTIVATIONS = (IDENTITY, RELU)


def activate(z, activation):
    if activation == IDENTITY:
        return z
    if activation == RELU:
        return np.maximum(z, 0.0)
    raise ValueError(f"unknown activation {activation!r}")


def activation_grad(z, activation):
    """Derivative of the activation at pre-activation values z."""
    if activation == IDENTITY:
        return np.ones_like(z)
    if activation == RELU:
        return (z > 0).astype(z.dtype)
    raise ValueError(f"unknown activation {activation!r}")


@dataclass(eq=False)
class ModelParams:
    """Global bias w0, per-feature weights w and the weight matrices W.

    W[0] is the m x d table W1 (the FM embedding table when layers == 0);
    W[l] for l >= 1 are the d x d weights of the deeper convolution layers.
    """

    w0: float
    w: np.ndarray
    W: list = field(default_factory=list)
    layers: int = 0
    activation: str = IDENTITY

    def __post_init__(self):
        if self.layers < 0:
            raise ValueError(f"layers must be >= 0, got {self.layers}")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        if len(self.W) != max(1, self.layers):
            raise ValueError(
                f"{self.layers} layers need {max(1, self.layers)} weight matrices, "
                f"got {len(self.W)}"
            )
        m, d = self.W[0].shape
        if self.w.shape != (m,):
            raise ValueError(f"w has shape {self.w.shape}, expected ({m},)")
        for l, Wl in enumerate(self.W[1:], start=2):
            if Wl.shape != (d, d):
                raise ValueError(f"W{l} has shape {Wl.shape}, expected ({d}, {d})")

    @property
    def num_features(self):
        return self.W[0].shape[0]

    @property
    def dim(self):
        return self.W[0].shape[1]

    @property
    def uses_graph(self):
        return self.layers >= 1

    def copy(self):
        return ModelParams(
            w0=float(self.w0),
            w=self.w.copy(),
            W=[Wl.copy() for Wl in self.W],
            layers=self.layers,
            activation=self.activation,
        )

    def squared_norm(self, include_bias=True):
        """||Theta||^2 over w0, w (optional) and every W."""
        total = sum(float(np.sum(Wl * Wl)) for Wl in self.W)
        if include_bias:
            total += float(self.w0) ** 2 + float(np.dot(self.w, self.w))
        return total


def init_params(num_features, dim, layers, activation=IDENTITY, seed=None, std=0.01):
    """W matrices ~ N(0, std^2); w and w0 start at zero."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    W = [rng.normal(0.0, std, size=(num_features, dim))]
    for _ in range(max(0, layers - 1)):
        W.append(rng.normal(0.0, std, size=(dim, dim)))
    return ModelParams(
        w0=0.0,
        w=np.zeros(num_features),
        W=W,
        layers=layers,
        activation=activation,
    )
