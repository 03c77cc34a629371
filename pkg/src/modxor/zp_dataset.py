"""Synthetic data for the p-class modular-difference problem.

Pairs (a, b) of integers mod p are classified by c = (a - b) mod p.  For
p = 2 this is exactly XOR.  Inputs are two concatenated p-dimensional
1-hot blocks (a-block first), optionally perturbed with additive
Gaussian noise.  Labels always come from the clean pair, never from the
noisy vector.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass
class ProblemSpec:
    """One problem instance: modulus, input noise level, batch size."""

    p: int
    noise_sigma: float = 0.1
    batch_size: int | None = None  # defaults to 10 * p**2
    composite_warning: bool = field(init=False, default=False)

    def __post_init__(self) -> None:
        if self.p < 2:
            raise ValueError(f"modulus p must be >= 2, got {self.p}")
        if self.noise_sigma < 0:
            raise ValueError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        if self.batch_size is None:
            self.batch_size = 10 * self.p * self.p
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        self.composite_warning = not is_prime(self.p)


class Batch(NamedTuple):
    inputs: np.ndarray  # (n, 2p) float64
    labels: np.ndarray  # (n,) int64


def class_label(a: int, b: int, p: int) -> int:
    """Class of the pair (a, b): their difference reduced mod p."""
    if not (0 <= a < p and 0 <= b < p):
        raise ValueError(f"inputs must lie in [0, {p}), got ({a}, {b})")
    return (a - b) % p


def continuous_class(a: float, b: float, p: int) -> int:
    """Class of a real pair in [0,1]^2: floor(p*(a-b) + 0.5) mod p.

    floor (not truncation) keeps the class bands contiguous across
    a - b = 0.
    """
    if not (0.0 <= a <= 1.0 and 0.0 <= b <= 1.0):
        raise ValueError(f"inputs must lie in [0, 1], got ({a}, {b})")
    return int(np.floor(p * (a - b) + 0.5)) % p


def one_hot(v: int, p: int) -> np.ndarray:
    if not 0 <= v < p:
        raise ValueError(f"index must lie in [0, {p}), got {v}")
    out = np.zeros(p)
    out[v] = 1.0
    return out


def encode_pair(a: int, b: int, p: int) -> np.ndarray:
    """Concatenated 1-hot encoding [a-block, b-block], length 2p."""
    return np.concatenate([one_hot(a, p), one_hot(b, p)])


def encode_pairs(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Clean encodings for whole integer arrays a, b at once."""
    n = a.shape[0]
    inputs = np.zeros((n, 2 * p))
    rows = np.arange(n)
    inputs[rows, a] = 1.0
    inputs[rows, p + b] = 1.0
    return inputs


def _draw_batch(spec: ProblemSpec, rng: np.random.Generator):
    """Pairs, clean encodings, noisy inputs and labels for one batch."""
    a = rng.integers(0, spec.p, size=spec.batch_size)
    b = rng.integers(0, spec.p, size=spec.batch_size)
    clean = encode_pairs(a, b, spec.p)
    if spec.noise_sigma > 0:
        noisy = clean + rng.normal(0.0, spec.noise_sigma, size=clean.shape)
    else:
        noisy = clean
    labels = ((a - b) % spec.p).astype(np.int64)
    return a, b, clean, noisy, labels


def sample_batch_with_clean(
    spec: ProblemSpec, rng: np.random.Generator
) -> tuple[Batch, np.ndarray]:
    """One noisy training batch plus the clean encodings of its pairs."""
    _, _, clean, noisy, labels = _draw_batch(spec, rng)
    return Batch(noisy, labels), clean


def sample_batch(spec: ProblemSpec, rng: np.random.Generator) -> Batch:
    """One noisy training batch; labels computed from the clean pairs."""
    batch, _ = sample_batch_with_clean(spec, rng)
    return batch


def full_test_grid(p: int) -> Batch:
    """All p^2 ordered pairs, noise free, in row-major (a, b) order."""
    if p < 2:
        raise ValueError(f"modulus p must be >= 2, got {p}")
    a, b = np.divmod(np.arange(p * p), p)
    inputs = encode_pairs(a, b, p)
    labels = (a - b) % p
    return Batch(inputs, labels.astype(np.int64))


def export_batch_csv(path, spec: ProblemSpec, rng: np.random.Generator) -> None:
    """Write one freshly sampled batch as CSV (a, b, label, x0..x{2p-1})."""
    a, b, _, inputs, labels = _draw_batch(spec, rng)
    header = ["a", "b", "label"] + [f"x{i}" for i in range(2 * spec.p)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(spec.batch_size):
            row = [int(a[i]), int(b[i]), int(labels[i])]
            row += [f"{x:.9g}" for x in inputs[i]]
            writer.writerow(row)
