"""Two-layer MLP: forward pass, softmax cross-entropy, analytic backprop.

Architecture: input (2p) -> hidden (h, default p) with a configurable
elementwise activation -> output (p) with softmax.  With h = p the
parameter count is exactly 3p^2 + 2p.  All arithmetic is float64.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .activations import Activation


@dataclass
class MlpParams:
    W1: np.ndarray  # (2p, h)
    b1: np.ndarray  # (h,)
    W2: np.ndarray  # (h, p)
    b2: np.ndarray  # (p,)

    def tensors(self) -> list[np.ndarray]:
        return [self.W1, self.b1, self.W2, self.b2]

    def param_count(self) -> int:
        return sum(t.size for t in self.tensors())

    def copy(self) -> "MlpParams":
        return MlpParams(*(t.copy() for t in self.tensors()))

    @property
    def p(self) -> int:
        return self.W2.shape[1]

    @property
    def hidden_width(self) -> int:
        return self.b1.shape[0]


def init_params(
    p: int,
    hidden_width: int | None = None,
    rng: np.random.Generator | None = None,
    init_sigma: float = 1.0,
    init_bias: str = "gaussian",
) -> MlpParams:
    """Gaussian-initialize all weights (and, by default, biases).

    Draw order is fixed (W1, b1, W2, b2) so a given seed always yields
    the same network.
    """
    if p < 2:
        raise ValueError(f"p must be >= 2, got {p}")
    h = p if hidden_width is None else hidden_width
    if h < 1:
        raise ValueError(f"hidden_width must be >= 1, got {h}")
    if init_sigma <= 0:
        raise ValueError(f"init_sigma must be > 0, got {init_sigma}")
    if init_bias not in ("gaussian", "zero"):
        raise ValueError(f"init_bias must be 'gaussian' or 'zero', got {init_bias!r}")
    if rng is None:
        rng = np.random.default_rng()
    W1 = rng.normal(0.0, init_sigma, size=(2 * p, h))
    b1 = rng.normal(0.0, init_sigma, size=h) if init_bias == "gaussian" else np.zeros(h)
    W2 = rng.normal(0.0, init_sigma, size=(h, p))
    b2 = rng.normal(0.0, init_sigma, size=p) if init_bias == "gaussian" else np.zeros(p)
    return MlpParams(W1, b1, W2, b2)


@dataclass
class ForwardCache:
    """Intermediate values of one forward pass, kept for backprop."""

    inputs: np.ndarray  # (n, 2p)
    z1: np.ndarray      # (n, h) hidden pre-activations
    a1: np.ndarray      # (n, h) hidden activations
    z2: np.ndarray      # (n, p) logits
    probs: np.ndarray   # (n, p) softmax rows
    logsumexp: np.ndarray  # (n,) per-row log of the softmax normalizer


def forward(params: MlpParams, act: Activation, inputs: np.ndarray) -> ForwardCache:
    if inputs.ndim != 2 or inputs.shape[1] != params.W1.shape[0]:
        raise ValueError(
            f"inputs must have shape (n, {params.W1.shape[0]}), got {inputs.shape}"
        )
    z1 = inputs @ params.W1
    z1 += params.b1
    a1 = act.fn(z1)
    z2 = a1 @ params.W2
    z2 += params.b2
    # Stable softmax: subtract the per-row max before exponentiating.
    m = z2.max(axis=1, keepdims=True)
    e = np.exp(z2 - m)
    s = e.sum(axis=1, keepdims=True)
    probs = e / s
    logsumexp = (m + np.log(s))[:, 0]
    return ForwardCache(inputs, z1, a1, z2, probs, logsumexp)


def predict(params: MlpParams, act: Activation, inputs: np.ndarray) -> np.ndarray:
    """Predicted class per row: argmax of the logits.

    Softmax is strictly increasing per row, so this matches the argmax
    of the probabilities while skipping the normalization.
    """
    z1 = inputs @ params.W1
    z1 += params.b1
    z2 = act.fn(z1) @ params.W2
    z2 += params.b2
    return np.argmax(z2, axis=1)


def loss(cache: ForwardCache, labels: np.ndarray) -> float:
    """Mean cross entropy, -log prob of the true class.

    Evaluated from the logits as logsumexp(z) - z[label], which equals
    -log(softmax(z)[label]) but stays finite even where the probability
    underflows to zero.
    """
    n = cache.z2.shape[0]
    true_logit = cache.z2[np.arange(n), labels]
    return float(np.mean(cache.logsumexp - true_logit))


def backward(
    params: MlpParams, act: Activation, cache: ForwardCache, labels: np.ndarray
) -> list[np.ndarray]:
    """Exact gradients of the mean cross entropy, ordered as tensors()."""
    n = cache.probs.shape[0]
    delta2 = cache.probs.copy()
    delta2[np.arange(n), labels] -= 1.0
    delta2 /= n
    dW2 = cache.a1.T @ delta2
    db2 = delta2.sum(axis=0)
    delta1 = (delta2 @ params.W2.T) * act.grad(cache.z1)
    dW1 = cache.inputs.T @ delta1
    db1 = delta1.sum(axis=0)
    return [dW1, db1, dW2, db2]


def accuracy_from_probs(probs: np.ndarray, labels: np.ndarray) -> float:
    # np.argmax breaks ties toward the lowest class index.
    return float(np.mean(np.argmax(probs, axis=1) == labels))


def accuracy(
    params: MlpParams, act: Activation, inputs: np.ndarray, labels: np.ndarray
) -> float:
    """Fraction of examples whose argmax probability matches the label."""
    if inputs.shape[0] == 0:
        raise ValueError("cannot evaluate accuracy on an empty example set")
    return float(np.mean(predict(params, act, inputs) == labels))


def save_checkpoint(
    path, params: MlpParams, activation: str, seed: int
) -> None:
    """Dump parameters as text: a 4-field header, then one value per
    line in row-major order (W1, b1, W2, b2)."""
    with open(path, "w") as fh:
        fh.write("p,h,activation,seed\n")
        fh.write(f"{params.p},{params.hidden_width},{activation},{seed}\n")
        for tensor in params.tensors():
            for v in tensor.ravel(order="C"):
                fh.write(f"{v:.17g}\n")


def load_checkpoint(path) -> tuple[MlpParams, str, int]:
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "p,h,activation,seed":
            raise ValueError(f"unrecognized checkpoint header: {header!r}")
        p_str, h_str, activation, seed_str = fh.readline().strip().split(",")
        p, h, seed = int(p_str), int(h_str), int(seed_str)
        values = np.array([float(line) for line in fh])
    shapes = [(2 * p, h), (h,), (h, p), (p,)]
    if values.size != sum(int(np.prod(s)) for s in shapes):
        raise ValueError("checkpoint value count does not match header shapes")
    tensors = []
    offset = 0
    for shape in shapes:
        size = int(np.prod(shape))
        tensors.append(values[offset : offset + size].reshape(shape))
        offset += size
    return MlpParams(*tensors), activation, seed
