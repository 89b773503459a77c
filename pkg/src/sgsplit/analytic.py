"""Asymptotic mean-square error of the scalar model problem, in closed form.

Six combinations: first-order dynamics x <- (1-h)x + h*u and exact damped
momentum flow, each under per-step resampling (rm), per-epoch reshuffling
(rr), and mirrored two-epoch reshuffling (sms). Every 1 - e^z factor goes
through expm1-style primitives; the naive forms lose all significance below
h ~ 1e-4.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

DEGENERATE_GAP = 1e-8
IMAG_TOL = 1e-10


def _check_h_unit(h: float):
    if not (0.0 < h < 1.0):
        raise ValueError(f"stepsize {h!r} outside (0, 1)")


def _check_h_pos(h: float):
    if not (math.isfinite(h) and h > 0.0):
        raise ValueError(f"stepsize {h!r} must be positive")


def _check_V(V: float):
    if not (math.isfinite(V) and V >= 0.0):
        raise ValueError(f"variance {V!r} must be nonnegative")


def _check_R(R: int):
    if R < 2:
        raise ValueError("need at least 2 batches per epoch")


def _check_gamma(gamma: float):
    if not (math.isfinite(gamma) and gamma > 0.0):
        raise ValueError(f"friction {gamma!r} must be positive")
    if abs(gamma - 2.0) < DEGENERATE_GAP:
        raise ValueError("friction too close to critical damping gamma = 2")


@dataclass(frozen=True)
class ModelParams:
    """Rescaled model-problem parameters shared by the closed forms."""

    h: float
    V: float
    R: int
    gamma: float = 1.0

    def __post_init__(self):
        _check_h_unit(self.h)
        _check_V(self.V)
        _check_R(self.R)
        _check_gamma(self.gamma)


def damping_eigenvalues(gamma: float):
    """Eigenvalues -gamma/2 +- sqrt((gamma/2)^2 - 1) of the damped flow matrix."""
    _check_gamma(gamma)
    half = 0.5 * gamma
    root = cmath.sqrt(complex(half * half - 1.0))
    return -half + root, -half - root


def cexpm1(z: complex) -> complex:
    """exp(z) - 1 without cancellation in the real part for small z."""
    x, y = z.real, z.imag
    re = math.expm1(x) * math.cos(y) - 2.0 * math.sin(0.5 * y) ** 2
    im = math.exp(x) * math.sin(y)
    return complex(re, im)


@dataclass(frozen=True)
class Flow2x2:
    """Exact flow of (x, v)' = (v, -x - gamma*v), as a matrix factory in t."""

    gamma: float

    def __post_init__(self):
        _check_gamma(self.gamma)

    @property
    def lambda_plus(self) -> complex:
        return damping_eigenvalues(self.gamma)[0]

    @property
    def lambda_minus(self) -> complex:
        return damping_eigenvalues(self.gamma)[1]

    def matrix(self, t: float) -> np.ndarray:
        g = self.gamma
        if g > 2.0:
            # distinct real eigenvalues; Sylvester interpolation of exp
            lp, lm = (x.real for x in damping_eigenvalues(g))
            ep, em = math.exp(t * lp), math.exp(t * lm)
            gap = lp - lm
            off = (ep - em) / gap
            return np.array(
                [[(lp * em - lm * ep) / gap, off],
                 [-off, (lp * ep - lm * em) / gap]]
            )
        # underdamped: scaled rotation with frequency omega
        omega = math.sqrt(1.0 - 0.25 * g * g)
        c = math.cos(omega * t)
        s = math.sin(omega * t) / omega
        decay = math.exp(-0.5 * g * t)
        return decay * np.array(
            [[c + 0.5 * g * s, s],
             [-s, c - 0.5 * g * s]]
        )


def exact_flow(t: float, gamma: float) -> np.ndarray:
    return Flow2x2(gamma).matrix(t)


def _one_minus_pow(h: float, m: float) -> float:
    """1 - (1-h)^m for 0 < h < 1, stable as h -> 0."""
    return -math.expm1(m * math.log1p(-h))


def sgd_rm_mse(h: float, V: float) -> float:
    _check_h_unit(h)
    _check_V(V)
    return V * h / (2.0 - h)


def _centered_square_sum(coeffs: np.ndarray, mean: float) -> float:
    return float(np.sum((coeffs - mean) ** 2))


def sgd_rr_mse(h: float, V: float, R: int) -> float:
    _check_h_unit(h)
    _check_V(V)
    _check_R(R)
    # per-epoch accumulated weights h(1-h)^j; their exact mean is
    # (1 - (1-h)^R)/R, which the expm1 form preserves at small h
    a = h * (1.0 - h) ** np.arange(R)
    abar = _one_minus_pow(h, R) / R
    var_u = V * R / (R - 1.0) * _centered_square_sum(a, abar)
    return var_u / _one_minus_pow(h, 2 * R)


def sgd_sms_mse(h: float, V: float, R: int) -> float:
    _check_h_unit(h)
    _check_V(V)
    _check_R(R)
    # each batch contributes at mirrored offsets j and 2R-1-j of the block,
    # weight h(q^j + q^(2R-1-j)); the pair's j-independent O(h) part must
    # cancel analytically or the deviations drown in rounding below h~1e-4,
    # so factor out q^((2R-1)/2) and push the j-dependence through sinh^2
    lnq = math.log1p(-h)
    u = (np.arange(R) - 0.5 * (2 * R - 1)) * lnq
    s = np.sinh(0.5 * u) ** 2
    half_power = math.exp(0.5 * (2 * R - 1) * lnq)
    dev = (4.0 * h * half_power) * (s - s.mean())
    var_u = V * R / (R - 1.0) * float(np.sum(dev * dev))
    return var_u / _one_minus_pow(h, 4 * R)


def _ratio(num: complex, den: complex) -> complex:
    if den == 0:
        raise ArithmeticError("vanishing denominator in closed form")
    return num / den


def _realize(total: complex, scale: float) -> float:
    if scale == 0.0:
        return 0.0
    if abs(total.imag) > IMAG_TOL * scale:
        raise ArithmeticError(
            f"imaginary residue {total.imag!r} exceeds {IMAG_TOL * scale!r}"
        )
    return total.real


def msgd_rm_mse(h: float, V: float, gamma: float) -> float:
    _check_h_pos(h)
    _check_V(V)
    lp, lm = damping_eigenvalues(gamma)
    fp, fm = cexpm1(h * lp), cexpm1(h * lm)
    terms = (
        lm * lm * _ratio(fp * fp, -cexpm1(2 * h * lp)),
        -2.0 * _ratio(fp * fm, -math.expm1(-gamma * h)),
        lp * lp * _ratio(fm * fm, -cexpm1(2 * h * lm)),
    )
    gap2 = (lp - lm) ** 2
    total = sum(terms) / gap2
    scale = sum(abs(t) for t in terms) / abs(gap2)
    return V * _realize(total, scale)


def _tanh_minus_z(z: complex) -> complex:
    """tanh(z) - z with full relative precision near z = 0."""
    if abs(z) > 0.9:
        return cmath.tanh(z) - z
    # sinh z - z cosh z = -sum_{k>=1} 2k z^(2k+1)/(2k+1)!
    zz = z * z
    p = z * zz
    fact = 6.0  # (2k+1)! at k=1
    total = complex(0.0)
    for k in range(1, 40):
        term = (2.0 * k / fact) * p
        total += term
        if abs(term) <= 1e-20 * abs(total):
            break
        p *= zz
        fact *= (2 * k + 2) * (2 * k + 3)
    return -total / cmath.cosh(z)


def _paired_kick_excess(beta: float, gamma: float) -> float:
    """J(s) + sh/gamma for J = (1-e^{shl+})(1-e^{shl-})/(1-e^{-gamma sh}).

    Written in beta = s*gamma*h/2; the O(beta^2) parts of the cosh difference
    and the compensating beta*sinh(beta)/gamma^2 term cancel exactly, so both
    are dropped analytically and the remainder starts at beta^4.
    """
    r = 1.0 - 4.0 / (gamma * gamma)
    if beta <= 1.0:
        # sum_{k>=2} beta^(2k) [ (r^k - 1)/(2k)! + 2/(gamma^2 (2k-1)!) ]
        b2 = beta * beta
        rk = r * r
        p = b2 * b2
        fact2k = 24.0  # (2k)! at k=2
        total = 0.0
        for k in range(2, 40):
            coeff = (rk - 1.0) / fact2k + (4.0 * k) / (gamma * gamma * fact2k)
            term = coeff * p
            total += term
            if abs(term) <= 1e-20 * abs(total) + 1e-320:
                break
            p *= b2
            rk *= r
            fact2k *= (2 * k + 1) * (2 * k + 2)
        return total / math.sinh(beta)
    alpha = cmath.sqrt(complex(r)) * beta
    num = (cmath.cosh(alpha).real - math.cosh(beta)) + (
        2.0 * beta / (gamma * gamma)
    ) * math.sinh(beta)
    return num / math.sinh(beta)


def msgd_rr_mse(h: float, V: float, gamma: float, R: int) -> float:
    _check_h_pos(h)
    _check_V(V)
    _check_R(R)
    lp, lm = damping_eigenvalues(gamma)

    # the printed six-term bracket equals W(R) - R*W(1) with
    # W(s) = lm^2 tanh(s h lp / 2) + lp^2 tanh(s h lm / 2) - 2 J(s);
    # the parts of W linear in s*h cancel between the two groups and are
    # removed before evaluation, leaving cubic-order pieces per group
    def excess(s: float) -> complex:
        zp, zm = 0.5 * s * h * lp, 0.5 * s * h * lm
        a = lm * lm * _tanh_minus_z(zp) + lp * lp * _tanh_minus_z(zm)
        c = -2.0 * _paired_kick_excess(0.5 * s * gamma * h, gamma)
        return a + c

    gap2 = gamma * gamma - 4.0
    total = (excess(R) - R * excess(1.0)) / (gap2 * (R - 1.0))
    scale = (abs(excess(R)) + R * abs(excess(1.0))) / (abs(gap2) * (R - 1.0))
    return V * _realize(total, scale)


def sms_epoch_system(h: float, gamma: float, R: int):
    """Two-epoch transition matrix M = e^{2RhA} and unit-variance kick covariance.

    The covariance collects each batch's mirrored pair of impulses
    (E^j + E^{2R-1-j})(I - E)e1 and centers them, so the R-1 exchangeable
    batch estimators enter through a positive accumulation with no
    cancellation.
    """
    _check_h_pos(h)
    _check_R(R)
    flow = Flow2x2(gamma)
    E = flow.matrix(h)
    b = (np.eye(2) - E) @ np.array([1.0, 0.0])
    impulses = np.empty((2 * R, 2))
    for j in range(2 * R):
        impulses[j] = b
        b = E @ b
    w = impulses[:R] + impulses[2 * R - 1 : R - 1 : -1]
    dev = w - w.mean(axis=0)
    Q_unit = (R / (R - 1.0)) * dev.T @ dev
    M = flow.matrix(2 * R * h)
    return M, Q_unit


def stationary_covariance(M: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Solve X = M X M^T + Q for the 2x2 stationary covariance."""
    if np.abs(np.linalg.eigvals(M)).max() >= 1.0:
        raise ArithmeticError("epoch map is not contractive")
    lhs = np.eye(4) - np.kron(M, M)
    x = np.linalg.solve(lhs, Q.reshape(-1))
    return x.reshape(2, 2)


def msgd_sms_mse(h: float, V: float, gamma: float, R: int) -> float:
    _check_h_pos(h)
    _check_V(V)
    M, Q_unit = sms_epoch_system(h, gamma, R)
    X = stationary_covariance(M, Q_unit)
    return V * float(X[0, 0])


def closed_form_mse(dynamics: str, strategy: str, h: float, V: float, R: int, gamma: float) -> float:
    """Dispatch on ('sgd'|'momentum') x ('rm'|'rr'|'sms')."""
    key = (dynamics.lower(), strategy.lower())
    if key == ("sgd", "rm"):
        return sgd_rm_mse(h, V)
    if key == ("sgd", "rr"):
        return sgd_rr_mse(h, V, R)
    if key == ("sgd", "sms"):
        return sgd_sms_mse(h, V, R)
    if key == ("momentum", "rm"):
        return msgd_rm_mse(h, V, gamma)
    if key == ("momentum", "rr"):
        return msgd_rr_mse(h, V, gamma, R)
    if key == ("momentum", "sms"):
        return msgd_sms_mse(h, V, gamma, R)
    raise ValueError(f"no closed form for {dynamics!r} x {strategy!r}")
