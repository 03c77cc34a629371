"""One training trial: noisy batches, certification stop rule, failure
classification.

A trial trains on freshly sampled noisy batches, one weight update per
batch (= one epoch).  After each update the batch's own examples are
re-scored without their noise (training accuracy is over the sampled
pairs, not the jittered vectors; noisy scoring would stall certification
forever at moderate p).  Training stops once ``stop_examples``
consecutive examples scored perfectly (counted over whole batches,
reset by any imperfect batch), and the run is a success only if the
network then scores exactly 1.0 on the clean grid of all p^2 pairs.
Hitting ``max_epochs`` first is a failure.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .activations import get_activation
from .network import accuracy, backward, forward, init_params, loss
from .optimizers import make_optimizer
from .zp_dataset import ProblemSpec, full_test_grid, sample_batch_with_clean

FAILURE_KINDS = (
    "never_learned",
    "trapped_false_minimum",
    "generalization_gap",
    "diverged",
    "epoch_cap",
)

# A failed run that never reached this training accuracy "never learned";
# trapped runs typically plateau above TRAPPED_TYPICAL_ACC.  Reporting
# only, never control flow.
NEVER_LEARNED_MAX_ACC = 0.40
TRAPPED_TYPICAL_ACC = 0.85

BATCH_PRESETS = ("10p2", "p2", "p2/10", "p2/100")


def resolve_batch_size(value: int | str | None, p: int) -> int:
    """Turn a batch-size preset into a concrete example count."""
    if value is None or value == "10p2":
        return 10 * p * p
    if value == "p2":
        return p * p
    if value == "p2/10":
        return max(1, p * p // 10)
    if value == "p2/100":
        return max(1, p * p // 100)
    if isinstance(value, str):
        if value.isdigit():
            return int(value)
        raise ValueError(
            f"batch_size must be a positive integer or one of {BATCH_PRESETS}, got {value!r}"
        )
    return int(value)


def derive_trial_seed(base_seed: int, label: str, trial_index: int) -> int:
    """Stable per-trial seed, independent of execution order."""
    digest = hashlib.sha256(f"{base_seed}|{label}|{trial_index}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


@dataclass
class TrainConfig:
    p: int
    optimizer: str
    activation: str
    lr: float
    batch_size: int | str | None = None  # None -> 10 p^2
    noise_sigma: float = 0.1
    hidden_width: int | None = None      # None -> p
    max_epochs: int = 10_000
    stop_examples: int | None = None     # None -> 20 p^2
    seed: int = 0
    init_sigma: float = 1.0
    init_bias: str = "gaussian"
    opt_params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.batch_size = resolve_batch_size(self.batch_size, self.p)
        if self.hidden_width is None:
            self.hidden_width = self.p
        if self.stop_examples is None:
            self.stop_examples = 20 * self.p * self.p
        if self.max_epochs < 1:
            raise ValueError(f"max_epochs must be >= 1, got {self.max_epochs}")


@dataclass
class TrialOutcome:
    success: bool
    failure_kind: str | None
    epochs_used: int
    weight_updates: int
    best_train_acc: float
    final_test_acc: float | None  # evaluated only when the stop rule fired
    train_acc_history: np.ndarray
    examples_consumed: int

    def to_record(self, config: TrainConfig, history_stride: int = 0) -> dict:
        """JSON-serializable one-line record: config echo plus outcome."""
        record = {f"config_{k}": v for k, v in asdict(config).items()}
        record.update(
            success=self.success,
            failure_kind=self.failure_kind,
            epochs_used=self.epochs_used,
            weight_updates=self.weight_updates,
            best_train_acc=self.best_train_acc,
            final_test_acc=self.final_test_acc,
            examples_consumed=self.examples_consumed,
        )
        if history_stride > 0:
            hist = self.train_acc_history[::history_stride]
            record["train_acc_history"] = [
                None if not math.isfinite(x) else float(x) for x in hist
            ]
        return record


class PerfectStreak:
    """Consecutive perfectly-classified training examples, over batches."""

    def __init__(self) -> None:
        self.count = 0

    def update(self, batch_perfect: bool, batch_size: int) -> int:
        if batch_perfect:
            self.count += batch_size
        else:
            self.count = 0
        return self.count


def min_certification_epochs(stop_examples: int, batch_size: int) -> int:
    """Fewest consecutive perfect batches that can fire the stop rule."""
    return -(-stop_examples // batch_size)


def classify_failure(
    train_acc_history,
    certified: bool,
    test_acc: float | None,
    diverged: bool = False,
    certification_possible: bool = True,
) -> str:
    """Name the failure mode of an unsuccessful trial."""
    if diverged:
        return "diverged"
    if certified:
        if test_acc is not None and test_acc == 1.0:
            raise ValueError("classify_failure called on a successful trial")
        return "generalization_gap"
    if not certification_possible:
        # The epoch budget could never have fired the stop rule; the
        # budget failed, not the training dynamics.
        return "epoch_cap"
    finite = [a for a in train_acc_history if math.isfinite(a)]
    best = max(finite) if finite else 0.0
    if best <= NEVER_LEARNED_MAX_ACC:
        return "never_learned"
    return "trapped_false_minimum"


def run_trial(config: TrainConfig) -> TrialOutcome:
    """Train one network under the certification protocol."""
    act = get_activation(config.activation)
    rng = np.random.default_rng(config.seed)
    params = init_params(
        config.p, config.hidden_width, rng, config.init_sigma, config.init_bias
    )
    opt = make_optimizer(config.optimizer, **config.opt_params)
    spec = ProblemSpec(config.p, config.noise_sigma, config.batch_size)
    tensors = params.tensors()

    streak = PerfectStreak()
    history: list[float] = []
    certified = False
    diverged = False

    # Blown-up cells (e.g. lr = 5) overflow by design; the divergence
    # check below turns that into a reported failure, not a warning.
    with np.errstate(all="ignore"):
        for _ in range(config.max_epochs):
            (noisy, labels), clean = sample_batch_with_clean(spec, rng)
            cache = forward(params, act, noisy)
            batch_loss = loss(cache, labels)
            grads = backward(params, act, cache, labels)
            # The update runs unconditionally: one update per epoch.
            opt.step(tensors, grads, config.lr, batch_loss)
            if not np.isfinite(batch_loss):
                history.append(float("nan"))
                diverged = True
                break
            # Certification accuracy: the updated network on the clean
            # encodings of this batch's pairs.
            acc = accuracy(params, act, clean, labels)
            history.append(acc)
            if streak.update(acc == 1.0, config.batch_size) >= config.stop_examples:
                certified = True
                break

    epochs_used = len(history)
    test_acc = None
    if certified:
        grid = full_test_grid(config.p)
        test_acc = accuracy(params, act, grid.inputs, grid.labels)
    success = certified and test_acc == 1.0

    failure_kind = None
    if not success:
        possible = config.max_epochs >= min_certification_epochs(
            config.stop_examples, config.batch_size
        )
        failure_kind = classify_failure(
            history, certified, test_acc, diverged, certification_possible=possible
        )

    finite = [a for a in history if math.isfinite(a)]
    return TrialOutcome(
        success=success,
        failure_kind=failure_kind,
        epochs_used=epochs_used,
        weight_updates=epochs_used,
        best_train_acc=max(finite) if finite else 0.0,
        final_test_acc=test_acc,
        train_acc_history=np.asarray(history),
        examples_consumed=epochs_used * config.batch_size,
    )
