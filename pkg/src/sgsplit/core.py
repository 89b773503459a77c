"""Shared primitives: dataset container, reproducible RNG streams, spectral norm, CSV loading."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

PACKAGE_VERSION = "0.1.0"

POWER_ITERATION_CAP = 100_000
DEFAULT_SPECTRAL_TOL = 1e-10


class RngStream:
    """Reproducible random stream keyed by (seed, stream_id).

    Built on a counter-based generator, so the draw sequence is a pure
    function of the key: identical across runs, platforms and thread
    schedules. Distinct stream ids give statistically independent streams,
    one per Monte-Carlo realization. Consecutive calls continue the same
    stream, so ``random(a)`` followed by ``random(b)`` yields the same
    values as a single ``random(a + b)``; block prefetching relies on this.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        seed = int(seed)
        stream_id = int(stream_id)
        if not 0 <= seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")
        if not 0 <= stream_id < 2**64:
            raise ValueError("stream_id must fit in 64 unsigned bits")
        self.seed = seed
        self.stream_id = stream_id
        key = np.array([seed, stream_id], dtype=np.uint64)
        self.gen = np.random.Generator(np.random.Philox(key=key))

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


def sigmoid(t):
    """Logistic function 1/(1+exp(-t)), stable for any |t| a double can hold."""
    arr = np.atleast_1d(np.asarray(t, dtype=np.float64))
    out = np.empty_like(arr)
    pos = arr >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-arr[pos]))
    e = np.exp(arr[~pos])
    out[~pos] = e / (1.0 + e)
    if np.ndim(t) == 0:
        return float(out[0])
    return out


@dataclass
class Dataset:
    """N labeled feature rows; labels are 0/1, features finite. Immutable once built."""

    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        self.features = np.ascontiguousarray(self.features, dtype=np.float64)
        self.labels = np.ascontiguousarray(self.labels, dtype=np.float64)
        if self.features.ndim != 2 or self.features.shape[0] < 1 or self.features.shape[1] < 1:
            raise ValueError("features must be a nonempty N x d matrix")
        if self.labels.shape != (self.features.shape[0],):
            raise ValueError("labels must hold one value per feature row")
        if not np.isfinite(self.features).all():
            raise ValueError("features contain non-finite values")
        if not np.isin(self.labels, (0.0, 1.0)).all():
            raise ValueError("every label must be exactly 0 or 1")
        self.features.setflags(write=False)
        self.labels.setflags(write=False)

    @property
    def N(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]


def load_dataset_csv(path) -> Dataset:
    """Read `label,feat_1,...,feat_d` rows into a Dataset.

    A header row is auto-detected (first field non-numeric) and skipped.
    Malformed rows raise ValueError naming the offending line.
    """
    with open(path, newline="") as fh:
        lines = fh.read().splitlines()

    feats = []
    labels = []
    d = None
    for ln, line in enumerate(lines, start=1):
        fields = line.split(",")
        if ln == 1:
            try:
                float(fields[0])
            except ValueError:
                continue  # header row
        if d is None:
            d = len(fields) - 1
            if d < 1:
                raise ValueError(f"{path}: line {ln}: expected label plus at least one feature")
        elif len(fields) - 1 != d:
            raise ValueError(f"{path}: line {ln}: expected {d + 1} fields, got {len(fields)}")
        try:
            row = [float(tok) for tok in fields]
        except ValueError:
            raise ValueError(f"{path}: line {ln}: non-numeric field") from None
        if row[0] not in (0.0, 1.0):
            raise ValueError(f"{path}: line {ln}: label must be 0 or 1, got {fields[0]}")
        labels.append(row[0])
        feats.append(row[1:])
    if not feats:
        raise ValueError(f"{path}: no data rows")
    return Dataset(np.array(feats), np.array(labels))


def generate_simdata(N: int, d: int, rng: RngStream) -> Dataset:
    """Synthetic classification data: i.i.d. standard-normal features, a hidden
    standard-normal parameter theta, and Bernoulli(sigmoid(theta . y_i)) labels.

    Fully determined by the stream: features, then theta, then label uniforms.
    """
    if N < 1 or d < 1:
        raise ValueError("need N >= 1 and d >= 1")
    g = rng.gen
    feats = g.standard_normal((N, d))
    theta = g.standard_normal(d)
    p = sigmoid(feats @ theta)
    labels = (g.random(N) < p).astype(np.float64)
    return Dataset(feats, labels)


def spectral_norm_gram(features, tol: float = DEFAULT_SPECTRAL_TOL) -> float:
    """Largest eigenvalue of Y^T Y via power iteration on the d x d Gram matrix.

    Uses the fixed all-ones (normalized) start vector and never forms an
    N x N product. Stops when successive Rayleigh quotients agree to a
    relative tolerance of tol.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    Y = np.asarray(features, dtype=np.float64)
    gram = Y.T @ Y
    if not gram.any():
        return 0.0
    v = np.ones(gram.shape[0]) / math.sqrt(gram.shape[0])
    lam = 0.0
    for _ in range(POWER_ITERATION_CAP):
        w = gram @ v
        nrm = float(np.linalg.norm(w))
        if nrm == 0.0:
            raise ArithmeticError("power iteration start vector lies in the kernel")
        v = w / nrm
        lam_new = float(v @ (gram @ v))
        if abs(lam_new - lam) <= tol * max(1.0, abs(lam_new)):
            return lam_new
        lam = lam_new
    raise ArithmeticError(
        f"power iteration did not converge in {POWER_ITERATION_CAP} steps; last estimate {lam}"
    )
