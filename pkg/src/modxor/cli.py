"""Command line front end.

Two modes share one flag set: a single-run mode that trains one
configuration for one or more trials, and a sweep mode (--sweep) that
runs a whole benchmark grid from a config file and renders the result
table.

Exit codes: 0 success, 1 usage or config error, 2 training failure
(single-run mode, no trial succeeded), 3 I/O error.
"""
from __future__ import annotations

import argparse
import sys

from .activations import ACTIVATION_NAMES
from .optimizers import OPTIMIZER_NAMES, make_optimizer
from .sweep import CellKey, emit, parse_sweep_config, run_sweep
from .trainer import TrainConfig, derive_trial_seed, run_trial
from .zp_dataset import is_prime


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on bad usage, not argparse's 2
        raise _UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="modxor",
        description=(
            "Benchmark gradient-descent optimizers and activation functions "
            "on the p-class modular-difference generalization of XOR."
        ),
        epilog=(
            "Single-run mode needs --p, --optimizer, --activation and "
            "--learning-rate; it exits 0 if at least one trial reaches exact "
            "accuracy on the full p^2 grid. Sweep mode (--sweep) reads a "
            "key=value config file and writes the aggregated table to --out."
        ),
    )
    run = parser.add_argument_group("single run")
    run.add_argument("--p", type=int, help="modulus / number of classes")
    run.add_argument("--optimizer", help=f"one of: {', '.join(OPTIMIZER_NAMES)}")
    run.add_argument("--activation", help=f"one of: {', '.join(ACTIVATION_NAMES)}")
    run.add_argument("--learning-rate", type=float, help="initial learning rate")
    run.add_argument(
        "--batch-size",
        default=None,
        help="examples per batch: an integer or a preset (10p2, p2, p2/10, p2/100); default 10p2",
    )
    run.add_argument("--trials", type=int, default=1, help="independent trials to run")
    run.add_argument("--seed", type=int, default=0, help="base seed; per-trial seeds derive from it")
    run.add_argument("--max-epochs", type=int, default=10_000)
    run.add_argument("--hidden-width", type=int, default=None, help="hidden units, default p")
    run.add_argument("--noise-sigma", type=float, default=0.1, help="stddev of the input noise")
    run.add_argument(
        "--opt-param",
        action="append",
        default=[],
        metavar="K=V",
        help="optimizer hyperparameter override, repeatable (e.g. --opt-param mu=0.95)",
    )
    sweep = parser.add_argument_group("sweep")
    sweep.add_argument("--sweep", metavar="CONFIG", help="sweep config file; enables sweep mode")
    sweep.add_argument("--manifest", help="completed-trial manifest (default: OUT.manifest.jsonl)")
    common = parser.add_argument_group("output")
    common.add_argument("--out", help="output path (required for sweeps)")
    common.add_argument("--format", choices=("csv", "markdown", "jsonl"), default="csv")
    common.add_argument("--jobs", type=int, default=None, help="parallel trial workers")
    common.add_argument(
        "--allow-composite",
        action="store_true",
        help="benchmark composite p values (the task is cleanest for primes)",
    )
    return parser


def _parse_opt_params(pairs: list[str]) -> dict:
    out = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise _UsageError(f"--opt-param expects K=V, got {pair!r}")
        try:
            out[key.strip()] = float(value)
        except ValueError:
            raise _UsageError(f"--opt-param value must be numeric, got {pair!r}") from None
    return out


def _single_run(args) -> int:
    missing = [
        flag
        for flag, value in (
            ("--p", args.p),
            ("--optimizer", args.optimizer),
            ("--activation", args.activation),
            ("--learning-rate", args.learning_rate),
        )
        if value is None
    ]
    if missing:
        raise _UsageError(f"single-run mode requires {', '.join(missing)}")
    if args.learning_rate <= 0:
        raise _UsageError("--learning-rate must be positive")
    if args.trials < 1:
        raise _UsageError("--trials must be >= 1")
    if args.p < 2:
        raise _UsageError("--p must be >= 2")
    if not is_prime(args.p) and not args.allow_composite:
        raise _UsageError(
            f"p={args.p} is composite; the task is cleanest for prime p "
            "(pass --allow-composite to run it anyway)"
        )
    opt_params = _parse_opt_params(args.opt_param)
    try:
        make_optimizer(args.optimizer, **opt_params)  # validate early
    except ValueError as exc:
        raise _UsageError(str(exc)) from None

    label = CellKey(args.optimizer, args.activation, args.learning_rate, args.p).label()
    records = []
    successes = 0
    success_epochs = []
    for i in range(args.trials):
        config = TrainConfig(
            p=args.p,
            optimizer=args.optimizer,
            activation=args.activation,
            lr=args.learning_rate,
            batch_size=args.batch_size,
            noise_sigma=args.noise_sigma,
            hidden_width=args.hidden_width,
            max_epochs=args.max_epochs,
            seed=derive_trial_seed(args.seed, label, i),
            opt_params=opt_params,
        )
        outcome = run_trial(config)
        if outcome.success:
            successes += 1
            success_epochs.append(outcome.epochs_used)
            print(
                f"trial {i}: success after {outcome.epochs_used} epochs "
                f"({outcome.examples_consumed} examples)"
            )
        else:
            print(
                f"trial {i}: failure ({outcome.failure_kind}) after "
                f"{outcome.epochs_used} epochs, best training accuracy "
                f"{outcome.best_train_acc:.3f}"
            )
        stride = max(1, args.max_epochs // 200)
        records.append(outcome.to_record(config, history_stride=stride))

    if args.trials > 1:
        mean = sum(success_epochs) / successes if successes else 0.0
        print(
            f"summary: {successes}/{args.trials} trials succeeded"
            + (f", mean epochs over successes {mean:.0f}" if successes else "")
        )
    if args.out:
        import json

        try:
            with open(args.out, "w") as fh:
                for rec in records:
                    fh.write(json.dumps(rec, sort_keys=True) + "\n")
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
            return 3
    return 0 if successes else 2


def _sweep_mode(args) -> int:
    for flag, value in (
        ("--p", args.p),
        ("--optimizer", args.optimizer),
        ("--activation", args.activation),
        ("--learning-rate", args.learning_rate),
    ):
        if value is not None:
            raise _UsageError(f"{flag} cannot be combined with --sweep")
    if args.opt_param:
        raise _UsageError("--opt-param cannot be combined with --sweep")
    if not args.out:
        raise _UsageError("sweep mode requires --out")
    try:
        with open(args.sweep) as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read {args.sweep}: {exc}", file=sys.stderr)
        return 3
    overrides = {}
    if args.allow_composite:
        overrides["allow_composite"] = True
    if args.jobs is not None:
        overrides["parallelism"] = args.jobs
    try:
        spec = parse_sweep_config(text, **overrides)
    except ValueError as exc:
        raise _UsageError(f"{args.sweep}: {exc}") from None

    manifest = args.manifest or f"{args.out}.manifest.jsonl"
    try:
        result = run_sweep(spec, manifest_path=manifest, jobs=args.jobs, progress=True)
        emit(result, args.format, args.out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    cells = len(spec.cells())
    print(f"wrote {args.format} for {cells} cells to {args.out}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.sweep:
            return _sweep_mode(args)
        return _single_run(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(f"run '{parser.prog} --help' for usage", file=sys.stderr)
        return 1
    except SystemExit as exc:  # argparse --help
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
