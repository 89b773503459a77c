"""Minibatch index streams over [0, N): RM, RR, SMS, IG and SO strategies.

A "resampling event" is the only place randomness enters. Each event consumes
exactly ``draw_count(N, take)`` uniforms from the stream and feeds them to a
partial Fisher-Yates shuffle; everything downstream is a deterministic slice.
The vectorized kernel reproduces the scalar shuffle entry for entry, which is
what lets the fast multi-realization engine replay the reference loop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False

STRATEGIES = ("rm", "rr", "sms", "ig", "so")


def draw_count(N: int, take: int) -> int:
    """Uniforms consumed by one resampling event that needs `take` slots."""
    return min(int(take), int(N) - 1)


def partial_shuffle(N: int, cnt: int, u) -> np.ndarray:
    """First `cnt` Fisher-Yates swaps of arange(N), driven by uniforms u."""
    a = np.arange(N, dtype=np.int64)
    for j in range(cnt):
        r = j + int(u[j] * (N - j))
        a[j], a[r] = a[r], a[j]
    return a


if _HAVE_NUMBA:

    @njit(cache=True)
    def _fy_rows(A, U, cnt):  # pragma: no cover - compiled
        B, N = A.shape
        for b in range(B):
            for j in range(cnt):
                r = j + int(U[b, j] * (N - j))
                t = A[b, j]
                A[b, j] = A[b, r]
                A[b, r] = t


def _fy_rows_numpy(A, U, cnt):
    B, N = A.shape
    rows = np.arange(B)
    for j in range(cnt):
        r = j + (U[:, j] * (N - j)).astype(np.int64)
        aj = A[rows, j].copy()
        A[rows, j] = A[rows, r]
        A[rows, r] = aj


def batched_partial_shuffle(N: int, cnt: int, U) -> np.ndarray:
    """Row-wise partial_shuffle for a block of realizations.

    U has shape (B, cnt); row b must produce exactly partial_shuffle(N, cnt, U[b]).
    """
    U = np.asarray(U, dtype=np.float64)
    B = U.shape[0]
    A = np.broadcast_to(np.arange(N, dtype=np.int64), (B, N)).copy()
    if cnt == 0:
        return A
    if _HAVE_NUMBA:
        _fy_rows(A, U, cnt)
    else:
        _fy_rows_numpy(A, U, cnt)
    return A


@dataclass(frozen=True)
class BatchMatrix:
    """m x n matrix of pairwise-distinct dataset indices, one batch per row."""

    entries: np.ndarray

    def __post_init__(self):
        e = np.ascontiguousarray(self.entries, dtype=np.int64)
        if e.ndim != 2:
            raise ValueError("entries must be an m x n matrix")
        if e.min(initial=0) < 0:
            raise ValueError("indices must be nonnegative")
        if len(np.unique(e)) != e.size:
            raise ValueError("indices must be pairwise distinct")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    @property
    def n(self) -> int:
        return self.entries.shape[1]


@dataclass(frozen=True)
class Batch:
    """Ordered index list plus the ragged-batch weight |indices| / n."""

    indices: np.ndarray
    weight: float


def sample_batch_matrix(N: int, n: int, m: int, rng) -> BatchMatrix:
    """Uniform m*n-subset arrangement of [0, N), without replacement.

    Implemented as a partial Fisher-Yates shuffle taking the first m*n
    entries, reshaped row-major.
    """
    if n < 1 or m < 1:
        raise ValueError("need n >= 1 and m >= 1")
    if m * n > N:
        raise ValueError(f"cannot draw m*n={m * n} distinct indices from N={N}")
    cnt = draw_count(N, m * n)
    perm = partial_shuffle(N, cnt, rng.gen.random(cnt))
    return BatchMatrix(perm[: m * n].reshape(m, n).copy())


@dataclass
class ScheduleState:
    """Iteration state of a batch stream.

    R = ceil(N / n) batches per epoch; when n does not divide N the last
    batch of the ordering is short (n_R = N - n(R-1) indices) and carries
    weight n_R / n. Resampling cadence: RM every call, RR every R calls,
    SMS every 2R calls with calls R..2R-1 replaying batches R-1..0 in exact
    reverse, SO once, IG never (identity ordering).
    """

    strategy: str
    N: int
    n: int
    R: int = field(init=False)
    phase: int = field(init=False, default=0)
    current: np.ndarray | None = field(init=False, default=None, repr=False)

    def __post_init__(self):
        s = str(self.strategy).lower()
        if s not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}; expected one of {STRATEGIES}")
        self.strategy = s
        if self.N < 1 or not 1 <= self.n <= self.N:
            raise ValueError("need N >= 1 and 1 <= n <= N")
        self.R = math.ceil(self.N / self.n)
        if s == "ig":
            self.current = np.arange(self.N, dtype=np.int64)

    @property
    def period(self) -> int:
        return 2 * self.R if self.strategy == "sms" else self.R


def _full_shuffle(N, rng):
    cnt = draw_count(N, N)
    return partial_shuffle(N, cnt, rng.gen.random(cnt))


def next_batch(state: ScheduleState, rng) -> Batch:
    """Advance the stream one iteration and return its batch. Mutates state."""
    N, n, R = state.N, state.n, state.R
    s = state.strategy
    if s == "rm":
        cnt = draw_count(N, n)
        perm = partial_shuffle(N, cnt, rng.gen.random(cnt))
        state.phase += 1
        return Batch(perm[:n].copy(), 1.0)

    if s == "rr":
        r = state.phase % R
        if r == 0:
            state.current = _full_shuffle(N, rng)
    elif s == "sms":
        p = state.phase % (2 * R)
        if p == 0:
            state.current = _full_shuffle(N, rng)
        r = p if p < R else 2 * R - 1 - p
    elif s == "so":
        if state.current is None:
            state.current = _full_shuffle(N, rng)
        r = state.phase % R
    else:  # ig
        r = state.phase % R
    lo, hi = r * n, min((r + 1) * n, N)
    idx = state.current[lo:hi].copy()
    state.phase += 1
    return Batch(idx, len(idx) / n)
