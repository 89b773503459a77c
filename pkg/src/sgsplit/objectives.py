"""Finite-sum objectives: ridge logistic regression and the scalar Gaussian mean model.

Both expose the same oracle surface: value, full gradient (the mean of the N
component gradients), per-component gradients, and vectorized batch means.
"""

from __future__ import annotations

import math

import numpy as np

from .batching import batched_partial_shuffle, draw_count
from .core import DEFAULT_SPECTRAL_TOL, Dataset, sigmoid, spectral_norm_gram


def softplus(t):
    """log(1 + exp(t)) without overflow."""
    t = np.asarray(t, dtype=np.float64)
    return np.maximum(t, 0.0) + np.log1p(np.exp(-np.abs(t)))


class Objective:
    """Oracle interface shared by all finite-sum objectives."""

    N: int
    d: int

    def value(self, x) -> float:
        raise NotImplementedError

    def full_gradient(self, x) -> np.ndarray:
        raise NotImplementedError

    def component_gradient(self, i, x) -> np.ndarray:
        raise NotImplementedError

    def batch_mean_gradient(self, indices, x) -> np.ndarray:
        g = np.zeros(self.d)
        for i in indices:
            g += self.component_gradient(int(i), x)
        return g / len(indices)

    def batched_batch_gradient(self, I, X, weight) -> np.ndarray:
        """Weighted batch-mean gradients for a block of realizations.

        I: (B, nb) index rows; X: (B, d) positions. Row b must equal
        weight * batch_mean_gradient(I[b], X[b]).
        """
        raise NotImplementedError

    def describe(self) -> str:
        raise NotImplementedError


class LogRegObjective(Objective):
    """Mean of f_i(x) = lam/2 |x|^2 - z_i x.y_i + log(1 + exp(x.y_i))."""

    def __init__(self, dataset: Dataset, lam: float):
        if lam < 0:
            raise ValueError("ridge coefficient must be nonnegative")
        self.dataset = dataset
        self.lam = float(lam)
        self.N = dataset.N
        self.d = dataset.d
        self._F = dataset.features
        self._z = dataset.labels
        self._L = None

    @property
    def gram_smoothness(self) -> float:
        """|Y^T Y| / 4N, the curvature scale of the unregularized part."""
        if self._L is None:
            self._L = spectral_norm_gram(self._F) / (4.0 * self.N)
        return self._L

    def value(self, x):
        x = np.asarray(x, dtype=np.float64)
        t = self._F @ x
        return 0.5 * self.lam * float(x @ x) + float(np.mean(softplus(t) - self._z * t))

    def component_value(self, i, x):
        x = np.asarray(x, dtype=np.float64)
        t = float(self._F[i] @ x)
        return 0.5 * self.lam * float(x @ x) - self._z[i] * t + float(softplus(t))

    def full_gradient(self, x):
        x = np.asarray(x, dtype=np.float64)
        t = self._F @ x
        return self.lam * x + self._F.T @ (sigmoid(t) - self._z) / self.N

    def component_gradient(self, i, x):
        x = np.asarray(x, dtype=np.float64)
        t = float(self._F[i] @ x)
        return self.lam * x + (sigmoid(t) - self._z[i]) * self._F[i]

    def batch_mean_gradient(self, indices, x):
        x = np.asarray(x, dtype=np.float64)
        Fb = self._F[indices]
        t = Fb @ x
        return self.lam * x + Fb.T @ (sigmoid(t) - self._z[indices]) / len(indices)

    def batched_batch_gradient(self, I, X, weight):
        Fb = self._F[I]
        t = np.einsum("bnd,bd->bn", Fb, X)
        s = sigmoid(t) - self._z[I]
        g = self.lam * X + np.einsum("bnd,bn->bd", Fb, s) / I.shape[1]
        return weight * g

    def describe(self):
        return f"logreg(N={self.N}, d={self.d}, lambda={self.lam!r})"


class GaussianMeanObjective(Objective):
    """Scalar model problem: component i has gradient N sigma_i^-2 (x - y_i).

    The minimizer is the sigma^-2-weighted mean of y (the plain mean when the
    sigma_i are constant).
    """

    def __init__(self, y, sigma_sq):
        self.y = np.ascontiguousarray(y, dtype=np.float64)
        self.sigma_sq = np.ascontiguousarray(sigma_sq, dtype=np.float64)
        if self.y.ndim != 1 or self.y.size < 1:
            raise ValueError("y must be a nonempty vector")
        if self.sigma_sq.shape != self.y.shape:
            raise ValueError("sigma_sq must match y in length")
        if not (np.isfinite(self.y).all() and np.isfinite(self.sigma_sq).all()):
            raise ValueError("observations and variances must be finite")
        if (self.sigma_sq <= 0).any():
            raise ValueError("variances must be positive")
        self.N = self.y.size
        self.d = 1
        # component curvatures N sigma_i^-2
        self.curvatures = self.N / self.sigma_sq
        self.y.setflags(write=False)
        self.sigma_sq.setflags(write=False)
        self.curvatures.setflags(write=False)

    def weighted_mean(self) -> float:
        return float(np.average(self.y, weights=1.0 / self.sigma_sq))

    def _scalar(self, x) -> float:
        return float(np.asarray(x, dtype=np.float64).reshape(-1)[0])

    def value(self, x):
        x0 = self._scalar(x)
        return float(np.mean(0.5 * self.curvatures * (x0 - self.y) ** 2))

    def full_gradient(self, x):
        x0 = self._scalar(x)
        return np.array([np.mean(self.curvatures * (x0 - self.y))])

    def component_gradient(self, i, x):
        x0 = self._scalar(x)
        return np.array([self.curvatures[i] * (x0 - self.y[i])])

    def batch_mean_gradient(self, indices, x):
        x0 = self._scalar(x)
        return np.array([np.mean(self.curvatures[indices] * (x0 - self.y[indices]))])

    def batched_batch_gradient(self, I, X, weight):
        diff = X - self.y[I]  # (B,1) against (B,nb)
        g = np.mean(self.curvatures[I] * diff, axis=1, keepdims=True)
        return weight * g

    def describe(self):
        return f"gaussian(N={self.N})"


def logreg_constants(dataset: Dataset, tol: float = DEFAULT_SPECTRAL_TOL):
    """Curvature scale L = |Y^T Y| / 4N over the feature rows, and ridge L / sqrt(N)."""
    L = spectral_norm_gram(dataset.features, tol) / (4.0 * dataset.N)
    return L, L / math.sqrt(dataset.N)


def stochastic_gradient(obj: Objective, batch, x) -> np.ndarray:
    """Weighted batch-mean gradient; the weight keeps ragged epochs summing to the full gradient."""
    if len(batch.indices) == 0:
        raise ValueError("empty batch")
    return batch.weight * obj.batch_mean_gradient(batch.indices, x)


def sigma_star_sq(obj: Objective, x_star, n: int, reps: int, rng):
    """Monte-Carlo estimate of E |grad f_batch(x_star)|^2 over fresh size-n batches.

    Returns (estimate, standard error).
    """
    if reps < 1:
        raise ValueError("need reps >= 1")
    x_star = np.asarray(x_star, dtype=np.float64)
    cnt = draw_count(obj.N, n)
    U = rng.gen.random((reps, cnt)) if cnt else np.empty((reps, 0))
    I = batched_partial_shuffle(obj.N, cnt, U)[:, :n]
    X = np.ascontiguousarray(np.broadcast_to(x_star, (reps, obj.d)))
    G = obj.batched_batch_gradient(I, X, 1.0)
    s = np.einsum("bd,bd->b", G, G)
    if reps == 1:
        return float(s[0]), float("nan")
    return float(s.mean()), float(s.std(ddof=1) / math.sqrt(reps))
