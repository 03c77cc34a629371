"""Shared test fixtures: hand-built exact networks and gradient oracles."""
import numpy as np

from modxor.activations import Activation, get_activation
from modxor.network import MlpParams, forward, loss


def planted_p2_params(margin: float = 20.0) -> MlpParams:
    """An exact relu solution of the p=2 task.

    Hidden unit 0 fires (value 1) only for the pair (1,1), unit 1 only
    for (0,0); their sum is 1 exactly when a == b, and +-margin/2
    logits read the class off that sum.
    """
    m = margin
    W1 = np.array([
        [0.0, 1.0],   # a = 0
        [1.0, 0.0],   # a = 1
        [0.0, 1.0],   # b = 0
        [1.0, 0.0],   # b = 1
    ])
    b1 = np.array([-1.0, -1.0])
    W2 = np.array([
        [m, -m],
        [m, -m],
    ])
    b2 = np.array([-m / 2.0, m / 2.0])
    return MlpParams(W1, b1, W2, b2)


def broken_p2_params(margin: float = 20.0) -> MlpParams:
    """Like planted_p2_params but blind to the pair (1,1).

    Classifies 3 of the 4 clean pairs; batches that never draw (1,1)
    still look perfect.
    """
    params = planted_p2_params(margin)
    params.W1[:, 0] = 0.0
    return params


def finite_difference_grads(
    params: MlpParams,
    act: Activation,
    inputs: np.ndarray,
    labels: np.ndarray,
    h: float = 1e-5,
) -> list[np.ndarray]:
    """Central-difference gradient of the batch loss, one parameter at
    a time."""
    grads = []
    for tensor in params.tensors():
        grad = np.zeros_like(tensor)
        it = np.nditer(tensor, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            orig = tensor[idx]
            tensor[idx] = orig + h
            up = loss(forward(params, act, inputs), labels)
            tensor[idx] = orig - h
            down = loss(forward(params, act, inputs), labels)
            tensor[idx] = orig
            grad[idx] = (up - down) / (2.0 * h)
        grads.append(grad)
    return grads


def draw_instance_away_from_kinks(
    name: str,
    p: int,
    n: int,
    rng: np.random.Generator,
    margin: float = 1e-4,
    init_sigma: float = 0.7,
):
    """Random (params, batch) whose hidden pre-activations all sit at
    least ``margin`` away from the activation's kinks, so central
    differences never straddle a corner."""
    from modxor.network import init_params
    from modxor.zp_dataset import ProblemSpec, sample_batch

    act = get_activation(name)
    spec = ProblemSpec(p=p, noise_sigma=0.1, batch_size=n)
    for _ in range(200):
        params = init_params(p, p, rng, init_sigma=init_sigma)
        inputs, labels = sample_batch(spec, rng)
        z1 = inputs @ params.W1 + params.b1
        clear = all(np.abs(z1 - kink).min() > margin for kink in act.kinks)
        if clear:
            return params, inputs, labels
    raise AssertionError(f"could not draw a kink-free instance for {name}")
