"""Benchmark for gradient-descent optimizers on the p-class
modular-difference generalization of XOR."""

from .activations import ACTIVATION_NAMES, ACTIVATIONS, Activation, get_activation
from .network import (
    ForwardCache,
    MlpParams,
    accuracy,
    backward,
    forward,
    init_params,
    load_checkpoint,
    loss,
    predict,
    save_checkpoint,
)
from .optimizers import OPTIMIZER_NAMES, OPTIMIZERS, Optimizer, make_optimizer
from .sweep import (
    BestLrCell,
    CellKey,
    SweepResult,
    SweepSpec,
    best_lr_view,
    emit,
    parse_sweep_config,
    run_sweep,
)
from .trainer import (
    BATCH_PRESETS,
    FAILURE_KINDS,
    TrainConfig,
    TrialOutcome,
    classify_failure,
    derive_trial_seed,
    resolve_batch_size,
    run_trial,
)
from .zp_dataset import (
    Batch,
    ProblemSpec,
    class_label,
    continuous_class,
    encode_pair,
    encode_pairs,
    export_batch_csv,
    full_test_grid,
    is_prime,
    one_hot,
    sample_batch,
    sample_batch_with_clean,
)

__version__ = "0.1.0"
