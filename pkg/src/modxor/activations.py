"""The nine hidden-layer activation functions and their derivatives.

Three are differentiable (sigmoid, tanh, elu); the other six are
piecewise linear and are computed literally as the max of their affine
segments.  Derivatives use the right-hand convention at every kink: the
value returned is the slope of the segment active just to the right.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

# Breakpoints of the 3-segment linearized elu, from intersecting
# y = -1 with y = 0.231x - 0.387 and the latter with y = x.
_L3_LO = (-1.0 + 0.387) / 0.231
_L3_HI = -0.387 / (1.0 - 0.231)


def _sigmoid(x):
    e = np.exp(-np.abs(x))
    return np.where(x >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


def _sigmoid_grad(x):
    s = _sigmoid(x)
    return s * (1.0 - s)


def _tanh_grad(x):
    t = np.tanh(x)
    return 1.0 - t * t


def _elu(x):
    return np.where(x > 0, x, np.expm1(np.minimum(x, 0.0)))


def _elu_grad(x):
    return np.where(x >= 0, 1.0, np.exp(np.minimum(x, 0.0)))


def _relu(x):
    return np.maximum(0.0, x)


def _relu_grad(x):
    return np.where(x >= 0, 1.0, 0.0)


def _leaky_relu(x):
    return np.where(x >= 0, x, 0.2 * x)


def _leaky_relu_grad(x):
    return np.where(x >= 0, 1.0, 0.2)


def _bounded_relu(x):
    return np.minimum(np.maximum(0.0, x), 2.0)


def _bounded_relu_grad(x):
    return np.where((x >= 0) & (x < 2.0), 1.0, 0.0)


def _lelu(x):
    return np.maximum(-1.0, x)


def _lelu_grad(x):
    return np.where(x >= -1.0, 1.0, 0.0)


def _l3elu(x):
    return np.maximum(-1.0, np.maximum(0.231 * x - 0.387, x))


def _l3elu_grad(x):
    return np.where(x >= _L3_HI, 1.0, np.where(x >= _L3_LO, 0.231, 0.0))


def _llelu(x):
    return np.maximum(x, -1.0 + (x + 1.0) / 5.0)


def _llelu_grad(x):
    return np.where(x >= -1.0, 1.0, 0.2)


@dataclass(frozen=True)
class Activation:
    """Elementwise activation with its derivative and kink locations."""

    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    grad: Callable[[np.ndarray], np.ndarray]
    kinks: tuple[float, ...] = ()


ACTIVATIONS: dict[str, Activation] = {
    a.name: a
    for a in [
        Activation("sigmoid", _sigmoid, _sigmoid_grad),
        Activation("tanh", np.tanh, _tanh_grad),
        Activation("elu", _elu, _elu_grad),
        Activation("relu", _relu, _relu_grad, kinks=(0.0,)),
        Activation("leaky-relu", _leaky_relu, _leaky_relu_grad, kinks=(0.0,)),
        Activation("bounded-relu", _bounded_relu, _bounded_relu_grad, kinks=(0.0, 2.0)),
        Activation("lelu", _lelu, _lelu_grad, kinks=(-1.0,)),
        Activation("l3elu", _l3elu, _l3elu_grad, kinks=(_L3_LO, _L3_HI)),
        Activation("llelu", _llelu, _llelu_grad, kinks=(-1.0,)),
    ]
}

ACTIVATION_NAMES = tuple(ACTIVATIONS)


def get_activation(name: str) -> Activation:
    try:
        return ACTIVATIONS[name]
    except KeyError:
        raise ValueError(
            f"unknown activation {name!r}; valid names: {', '.join(ACTIVATION_NAMES)}"
        ) from None
