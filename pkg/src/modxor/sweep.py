"""Sweep orchestration: grids of (optimizer, activation, lr, p) cells.

Each cell runs a fixed number of independent trials with seeds derived
purely from (base_seed, cell, trial index), so results do not depend on
execution order or worker count.  Completed trials are appended to a
JSONL manifest; rerunning a sweep with the same manifest skips them,
and an interrupted-then-resumed sweep emits byte-identical tables.

The reported value of a cell is the mean epoch count over successful
trials, rounded to the nearest integer, or 0 when fewer than
``min_successes`` of the trials succeeded.
"""
from __future__ import annotations

import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field

from .activations import get_activation
from .optimizers import make_optimizer
from .trainer import TrainConfig, derive_trial_seed, resolve_batch_size, run_trial
from .zp_dataset import is_prime

DEFAULT_LRS = (0.01, 0.1, 1.0, 5.0)

CSV_COLUMNS = (
    "method,activation,lr,p,mean_epochs,successes,"
    "failures_never,failures_trapped,failures_gap,failures_diverged,failures_cap"
)

_FAILURE_COLUMNS = {
    "never_learned": "failures_never",
    "trapped_false_minimum": "failures_trapped",
    "generalization_gap": "failures_gap",
    "diverged": "failures_diverged",
    "epoch_cap": "failures_cap",
}


@dataclass(frozen=True)
class CellKey:
    optimizer: str
    activation: str
    lr: float
    p: int

    def label(self) -> str:
        return f"{self.optimizer}|{self.activation}|{self.lr:g}|{self.p}"


@dataclass
class SweepSpec:
    primes: list[int]
    optimizers: list[str]
    activations: list[str]
    lrs: list[float] = field(default_factory=lambda: list(DEFAULT_LRS))
    trials_per_cell: int = 10
    min_successes: int = 5
    base_seed: int = 0
    parallelism: int | None = None
    max_epochs: int = 10_000
    batch_size: int | str | None = None
    noise_sigma: float = 0.1
    hidden_width: int | None = None
    allow_composite: bool = False

    def __post_init__(self) -> None:
        if self.trials_per_cell < self.min_successes:
            raise ValueError(
                f"trials_per_cell ({self.trials_per_cell}) must be >= "
                f"min_successes ({self.min_successes})"
            )
        if not self.lrs or any(lr <= 0 for lr in self.lrs):
            raise ValueError("lrs must be a non-empty list of positive rates")
        for p in self.primes:
            if p < 2:
                raise ValueError(f"p must be >= 2, got {p}")
            if not self.allow_composite and not is_prime(p):
                raise ValueError(
                    f"p={p} is composite; pass allow_composite to benchmark it anyway"
                )
        for name in self.optimizers:
            make_optimizer(name)
        for name in self.activations:
            get_activation(name)

    def cells(self) -> list[CellKey]:
        return [
            CellKey(o, a, float(lr), p)
            for o in self.optimizers
            for a in self.activations
            for lr in self.lrs
            for p in self.primes
        ]

    def trial_config(self, cell: CellKey, trial_index: int) -> TrainConfig:
        seed = derive_trial_seed(self.base_seed, cell.label(), trial_index)
        return TrainConfig(
            p=cell.p,
            optimizer=cell.optimizer,
            activation=cell.activation,
            lr=cell.lr,
            batch_size=self.batch_size,
            noise_sigma=self.noise_sigma,
            hidden_width=self.hidden_width,
            max_epochs=self.max_epochs,
            seed=seed,
        )


@dataclass
class CellStats:
    key: CellKey
    successes: int = 0
    failure_counts: dict = field(default_factory=dict)
    success_epochs: list[int] = field(default_factory=list)

    def mean_epochs(self) -> float | None:
        if not self.success_epochs:
            return None
        return sum(self.success_epochs) / len(self.success_epochs)

    def reported_value(self, min_successes: int) -> int:
        """Table cell: rounded mean epochs, 0 unless enough successes."""
        if self.successes < min_successes:
            return 0
        return int(self.mean_epochs() + 0.5)


@dataclass
class SweepResult:
    spec: SweepSpec
    records: list[dict]

    def stats(self) -> dict[CellKey, CellStats]:
        by_cell = {cell: CellStats(cell) for cell in self.spec.cells()}
        for rec in self.records:
            cell = CellKey(rec["optimizer"], rec["activation"], rec["lr"], rec["p"])
            st = by_cell[cell]
            if rec["success"]:
                st.successes += 1
                st.success_epochs.append(rec["epochs_used"])
            else:
                kind = rec["failure_kind"]
                st.failure_counts[kind] = st.failure_counts.get(kind, 0) + 1
        return by_cell


def _make_record(spec: SweepSpec, cell: CellKey, trial_index: int) -> dict:
    config = spec.trial_config(cell, trial_index)
    outcome = run_trial(config)
    return {
        "optimizer": cell.optimizer,
        "activation": cell.activation,
        "lr": cell.lr,
        "p": cell.p,
        "trial_index": trial_index,
        "seed": config.seed,
        "batch_size": config.batch_size,
        "noise_sigma": config.noise_sigma,
        "hidden_width": config.hidden_width,
        "max_epochs": config.max_epochs,
        "success": outcome.success,
        "failure_kind": outcome.failure_kind,
        "epochs_used": outcome.epochs_used,
        "weight_updates": outcome.weight_updates,
        "best_train_acc": outcome.best_train_acc,
        "final_test_acc": outcome.final_test_acc,
        "examples_consumed": outcome.examples_consumed,
    }


def _record_matches_spec(rec: dict, spec: SweepSpec, cell: CellKey, trial_index: int) -> bool:
    config = spec.trial_config(cell, trial_index)
    return (
        rec.get("seed") == config.seed
        and rec.get("batch_size") == config.batch_size
        and rec.get("noise_sigma") == config.noise_sigma
        and rec.get("hidden_width") == config.hidden_width
        and rec.get("max_epochs") == config.max_epochs
    )


def load_manifest(path) -> dict[tuple[str, int], dict]:
    """Completed-trial records keyed by (cell label, trial index).

    A truncated trailing line (interrupted write) is ignored.
    """
    done: dict[tuple[str, int], dict] = {}
    if not os.path.exists(path):
        return done
    with open(path) as fh:
        for line in fh:
            try:
                rec = json.loads(line)
            except json.JSONDecodeError:
                continue
            cell = CellKey(rec["optimizer"], rec["activation"], rec["lr"], rec["p"])
            done[(cell.label(), rec["trial_index"])] = rec
    return done


def run_sweep(
    spec: SweepSpec,
    manifest_path=None,
    jobs: int | None = None,
    progress: bool = False,
) -> SweepResult:
    """Run all cells, resuming from the manifest when one is given."""
    if jobs is None:
        jobs = spec.parallelism or os.cpu_count() or 1
    cells = spec.cells()
    done = load_manifest(manifest_path) if manifest_path else {}

    tasks = []
    records = {}
    for cell in cells:
        for i in range(spec.trials_per_cell):
            key = (cell.label(), i)
            rec = done.get(key)
            if rec is not None and _record_matches_spec(rec, spec, cell, i):
                records[key] = rec
            else:
                tasks.append((cell, i))

    manifest = open(manifest_path, "a") if manifest_path else None
    completed = 0
    try:
        if jobs <= 1:
            for cell, i in tasks:
                rec = _make_record(spec, cell, i)
                records[(cell.label(), i)] = rec
                completed += 1
                _note_progress(manifest, rec, progress, completed, len(tasks))
        else:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                futures = {
                    pool.submit(_make_record, spec, cell, i): (cell, i)
                    for cell, i in tasks
                }
                for fut in as_completed(futures):
                    cell, i = futures[fut]
                    rec = fut.result()
                    records[(cell.label(), i)] = rec
                    completed += 1
                    _note_progress(manifest, rec, progress, completed, len(tasks))
    finally:
        if manifest:
            manifest.close()

    ordered = [
        records[(cell.label(), i)]
        for cell in cells
        for i in range(spec.trials_per_cell)
    ]
    return SweepResult(spec, ordered)


def _note_progress(manifest, rec: dict, progress: bool, completed: int, total: int) -> None:
    if manifest:
        manifest.write(json.dumps(rec, sort_keys=True) + "\n")
        manifest.flush()
    if progress:
        state = "ok" if rec["success"] else rec["failure_kind"]
        print(
            f"[{completed}/{total}] {rec['optimizer']}/{rec['activation']}"
            f"/lr={rec['lr']:g}/p={rec['p']} trial {rec['trial_index']}: "
            f"{state} after {rec['epochs_used']} epochs",
            file=sys.stderr,
        )


@dataclass
class BestLrCell:
    value: int            # rounded mean epochs; 0 when no lr qualified
    lr: float | None      # the winning rate, None when value is 0
    successes: int        # winner's successes, or the best seen when 0


def best_lr_view(result: SweepResult, by: str = "optimizer") -> dict[tuple[str, int], BestLrCell]:
    """Reduce over learning rates: the best qualifying cell per (method, p).

    ``by`` selects the row dimension ("optimizer" or "activation"); the
    winning lr minimizes mean epochs among cells with at least
    min_successes successes, ties going to the lower lr.  Combinations
    the sweep never ran are simply absent from the view.
    """
    if by not in ("optimizer", "activation"):
        raise ValueError(f"by must be 'optimizer' or 'activation', got {by!r}")
    min_successes = result.spec.min_successes
    groups: dict[tuple[str, int], list[CellStats]] = {}
    for cell, st in result.stats().items():
        groups.setdefault((getattr(cell, by), cell.p), []).append(st)

    view: dict[tuple[str, int], BestLrCell] = {}
    for key, group in groups.items():
        qualified = [st for st in group if st.successes >= min_successes]
        if qualified:
            best = min(
                qualified,
                key=lambda st: (st.reported_value(min_successes), st.key.lr),
            )
            view[key] = BestLrCell(
                best.reported_value(min_successes), best.key.lr, best.successes
            )
        else:
            view[key] = BestLrCell(0, None, max(st.successes for st in group))
    return view


def write_csv(result: SweepResult, path) -> None:
    """One row per cell with the aggregation rule applied."""
    stats = result.stats()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS.split(","))
        for cell in result.spec.cells():
            st = stats[cell]
            row = [
                cell.optimizer,
                cell.activation,
                f"{cell.lr:g}",
                cell.p,
                st.reported_value(result.spec.min_successes),
                st.successes,
            ]
            row += [
                st.failure_counts.get(kind, 0) for kind in _FAILURE_COLUMNS
            ]
            writer.writerow(row)


def write_jsonl(result: SweepResult, path) -> None:
    """One line per trial, in deterministic cell/trial order."""
    with open(path, "w") as fh:
        for rec in result.records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def _markdown_table(header: list[str], rows: list[list]) -> list[str]:
    lines = ["| " + " | ".join(str(h) for h in header) + " |"]
    lines.append("|" + "---|" * len(header))
    for row in rows:
        lines.append("| " + " | ".join(str(v) for v in row) + " |")
    return lines


def write_markdown(result: SweepResult, path) -> None:
    """Full per-cell table plus best-lr reductions, one column per p."""
    spec = result.spec
    stats = result.stats()
    ps = spec.primes
    lines = ["# Sweep results", ""]

    lines.append("## Mean epochs per cell (0 = fewer than "
                 f"{spec.min_successes}/{spec.trials_per_cell} trials converged)")
    lines.append("")
    rows = []
    for o in spec.optimizers:
        for a in spec.activations:
            for lr in spec.lrs:
                row = [o, a, f"{lr:g}"]
                for p in ps:
                    st = stats[CellKey(o, a, float(lr), p)]
                    row.append(st.reported_value(spec.min_successes))
                rows.append(row)
    lines += _markdown_table(["Method", "Activation", "Rate"] + [str(p) for p in ps], rows)

    for by, methods in (("optimizer", spec.optimizers), ("activation", spec.activations)):
        if len(spec.lrs) < 2:
            continue
        view = best_lr_view(result, by=by)
        lines += ["", f"## Best learning rate per {by}", ""]
        rows = []
        for m in methods:
            row = [m]
            for p in ps:
                cell = view.get((m, p))
                row.append("" if cell is None else cell.value)
            rows.append(row)
        lines += _markdown_table([by.capitalize()] + [str(p) for p in ps], rows)

    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def emit(result: SweepResult, format: str, path) -> None:
    """Render the sweep in one of the supported formats."""
    if format == "csv":
        write_csv(result, path)
    elif format == "markdown":
        write_markdown(result, path)
    elif format == "jsonl":
        write_jsonl(result, path)
    else:
        raise ValueError(f"unknown format {format!r}; use csv, markdown or jsonl")


_LIST_KEYS = {"primes", "optimizers", "activations", "lrs"}
_INT_KEYS = {"trials_per_cell", "min_successes", "base_seed", "max_epochs",
             "hidden_width", "parallelism"}
_FLOAT_KEYS = {"noise_sigma"}
_BOOL_KEYS = {"allow_composite"}


def parse_sweep_config(text: str, **overrides) -> SweepSpec:
    """Flat key/value sweep description.

    One ``key = value`` per line; lists are comma or whitespace
    separated; ``#`` starts a comment.  Keys mirror SweepSpec fields
    (``jobs`` is accepted for parallelism, ``batch_size`` takes an
    integer or a preset such as 10p2, p2, p2/10, p2/100).  Keyword
    overrides replace parsed values, which lets command-line flags win.
    """
    fields: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip().lower().replace("-", "_")
        value = value.strip()
        if key == "jobs":
            key = "parallelism"
        if key in _LIST_KEYS:
            items = value.replace(",", " ").split()
            if not items:
                raise ValueError(f"line {lineno}: {key} needs at least one value")
            if key == "lrs":
                fields[key] = [float(v) for v in items]
            elif key == "primes":
                fields[key] = [int(v) for v in items]
            else:
                fields[key] = items
        elif key in _INT_KEYS:
            fields[key] = int(value) if value else None
        elif key in _FLOAT_KEYS:
            fields[key] = float(value)
        elif key in _BOOL_KEYS:
            if value.lower() in ("1", "true", "yes", "on"):
                fields[key] = True
            elif value.lower() in ("0", "false", "no", "off"):
                fields[key] = False
            else:
                raise ValueError(f"line {lineno}: {key} must be true or false")
        elif key == "batch_size":
            fields[key] = value if value else None
        else:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
    fields.update(overrides)
    for required in ("primes", "optimizers", "activations"):
        if required not in fields:
            raise ValueError(f"sweep config is missing the {required!r} key")
    return SweepSpec(**fields)
