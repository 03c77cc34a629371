"""Per-parameter update rules for the nine benchmarked optimizers.

Every optimizer exposes the same interface: ``step(params, grads, lr,
loss)`` updates the parameter tensors in place.  ``loss`` is only used
by the two loss-driven (l4*) variants and is ignored by the rest.  Slot
buffers mirror the parameter shapes and are created on the first step.
"""
from __future__ import annotations

import numpy as np


class Optimizer:
    name = "base"

    def __init__(self):
        self.t = 0

    def _init_slots(self, params: list[np.ndarray]) -> None:
        pass

    def _apply(self, params, grads, lr, loss) -> None:
        raise NotImplementedError

    def step(
        self,
        params: list[np.ndarray],
        grads: list[np.ndarray],
        lr: float,
        loss: float | None = None,
    ) -> None:
        if len(params) != len(grads):
            raise ValueError("params and grads must have matching lengths")
        if self.t == 0:
            self._init_slots(params)
        self.t += 1
        self._apply(params, grads, lr, loss)


class Vanilla(Optimizer):
    name = "vanilla"

    def _apply(self, params, grads, lr, loss):
        for p, g in zip(params, grads):
            p -= lr * g


class Momentum(Optimizer):
    name = "momentum"

    def __init__(self, mu=0.9):
        super().__init__()
        self.mu = mu

    def _init_slots(self, params):
        self.acc = [np.zeros_like(p) for p in params]

    def _apply(self, params, grads, lr, loss):
        for p, g, a in zip(params, grads, self.acc):
            a *= self.mu
            a += g
            p -= lr * a


class Nesterov(Optimizer):
    name = "nesterov"

    def __init__(self, mu=0.9):
        super().__init__()
        self.mu = mu

    def _apply(self, params, grads, lr, loss):
        for p, g, a in zip(params, grads, self.acc):
            a *= self.mu
            a += g
            p -= lr * (g + self.mu * a)

    def _init_slots(self, params):
        self.acc = [np.zeros_like(p) for p in params]


class Adagrad(Optimizer):
    name = "adagrad"

    def __init__(self, init_acc=0.1, eps=1e-8):
        super().__init__()
        self.init_acc = init_acc
        self.eps = eps

    def _init_slots(self, params):
        self.acc = [np.full_like(p, self.init_acc) for p in params]

    def _apply(self, params, grads, lr, loss):
        for p, g, a in zip(params, grads, self.acc):
            a += g * g
            p -= lr * g / (np.sqrt(a) + self.eps)


class Adadelta(Optimizer):
    name = "adadelta"

    def __init__(self, rho=0.95, eps=1e-8):
        super().__init__()
        self.rho = rho
        self.eps = eps

    def _init_slots(self, params):
        self.avg_sq_grad = [np.zeros_like(p) for p in params]
        self.avg_sq_update = [np.zeros_like(p) for p in params]

    def _apply(self, params, grads, lr, loss):
        rho, eps = self.rho, self.eps
        for p, g, eg, ed in zip(params, grads, self.avg_sq_grad, self.avg_sq_update):
            eg *= rho
            eg += (1.0 - rho) * g * g
            # The accumulator tracks the unscaled update; lr only scales
            # the parameter change.
            update = np.sqrt(ed + eps) / np.sqrt(eg + eps) * g
            ed *= rho
            ed += (1.0 - rho) * update * update
            p -= lr * update


class RmsProp(Optimizer):
    name = "rmsprop"

    def __init__(self, decay=0.9, eps=1e-10):
        super().__init__()
        self.decay = decay
        self.eps = eps

    def _init_slots(self, params):
        self.avg_sq_grad = [np.zeros_like(p) for p in params]

    def _apply(self, params, grads, lr, loss):
        d, eps = self.decay, self.eps
        for p, g, eg in zip(params, grads, self.avg_sq_grad):
            eg *= d
            eg += (1.0 - d) * g * g
            p -= lr * g / np.sqrt(eg + eps)


class Adam(Optimizer):
    name = "adam"

    def __init__(self, beta1=0.9, beta2=0.999, eps=1e-8):
        super().__init__()
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps

    def _init_slots(self, params):
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]

    def _apply(self, params, grads, lr, loss):
        b1, b2 = self.beta1, self.beta2
        c1 = 1.0 - b1 ** self.t
        c2 = 1.0 - b2 ** self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * g * g
            p -= lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


class _L4Base(Optimizer):
    """Loss-driven step size around an inner direction estimate.

    Keeps a running floor ``min_loss`` of the attainable batch loss
    (seeded at gamma0 times the first observed loss, then the running
    minimum, slowly inflated by 1/forget_time per step so the floor can
    recover if the attainable loss rises).  The step along direction v
    is alpha * (loss - gamma * min_loss) / (<g_ema, v> + tiny), i.e. a
    fixed fraction of the step that would reach the floor under a
    linear model of the loss.  The learning-rate argument is ignored.
    """

    def __init__(self, alpha=0.15, gamma=0.9, gamma0=0.75, forget_time=1000.0,
                 mu=0.9, tiny=1e-12):
        super().__init__()
        self.alpha = alpha
        self.gamma = gamma
        self.gamma0 = gamma0
        self.forget_time = forget_time
        self.mu = mu
        self.tiny = tiny
        self.min_loss = None
        self.last_eta = None  # step size of the most recent update

    def _init_slots(self, params):
        self.m = [np.zeros_like(p) for p in params]

    def _grad_estimate(self, grads) -> list[np.ndarray]:
        # Bias-corrected exponential moving average of the gradients.
        c = 1.0 - self.mu ** self.t
        out = []
        for g, m in zip(grads, self.m):
            m *= self.mu
            m += (1.0 - self.mu) * g
            out.append(m / c)
        return out

    def _direction(self, g_ema: list[np.ndarray], grads: list[np.ndarray]) -> list[np.ndarray]:
        raise NotImplementedError

    def _apply(self, params, grads, lr, loss):
        if loss is None:
            raise ValueError(f"{self.name} requires the batch loss at every step")
        if self.min_loss is None:
            self.min_loss = self.gamma0 * loss
        else:
            self.min_loss = min(self.min_loss, loss)
        g_ema = self._grad_estimate(grads)
        direction = self._direction(g_ema, grads)
        inner = sum(float(np.sum(g * v)) for g, v in zip(g_ema, direction))
        eta = self.alpha * (loss - self.gamma * self.min_loss) / (inner + self.tiny)
        self.last_eta = eta
        for p, v in zip(params, direction):
            p -= eta * v
        self.min_loss *= 1.0 + 1.0 / self.forget_time


class L4Mom(_L4Base):
    name = "l4mom"

    def _direction(self, g_ema, grads):
        return g_ema


class L4Adam(_L4Base):
    name = "l4adam"

    def __init__(self, alpha=0.15, gamma=0.9, gamma0=0.75, forget_time=1000.0,
                 beta1=0.9, beta2=0.999, eps=1e-8, tiny=1e-12):
        super().__init__(alpha=alpha, gamma=gamma, gamma0=gamma0,
                         forget_time=forget_time, mu=beta1, tiny=tiny)
        self.beta2 = beta2
        self.eps = eps

    def _init_slots(self, params):
        super()._init_slots(params)
        self.v = [np.zeros_like(p) for p in params]

    def _direction(self, g_ema, grads):
        # Normalize the averaged gradient by the bias-corrected RMS of
        # the raw gradients, the usual adaptive-moment direction.
        c = 1.0 - self.beta2 ** self.t
        for g, v in zip(grads, self.v):
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
        return [g / (np.sqrt(v / c) + self.eps) for g, v in zip(g_ema, self.v)]


OPTIMIZERS: dict[str, type[Optimizer]] = {
    cls.name: cls
    for cls in [
        Vanilla, Momentum, Nesterov, Adagrad, Adadelta, RmsProp, Adam,
        L4Adam, L4Mom,
    ]
}

OPTIMIZER_NAMES = tuple(OPTIMIZERS)


def make_optimizer(name: str, **hyperparams) -> Optimizer:
    try:
        cls = OPTIMIZERS[name]
    except KeyError:
        raise ValueError(
            f"unknown optimizer {name!r}; valid names: {', '.join(OPTIMIZER_NAMES)}"
        ) from None
    try:
        return cls(**hyperparams)
    except TypeError:
        raise ValueError(
            f"invalid hyperparameters {sorted(hyperparams)} for optimizer {name!r}"
        ) from None
