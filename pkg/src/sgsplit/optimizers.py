"""Single-step update maps and stepsize schedules.

All maps take the gradient in ascent orientation (g = grad f) and apply the
descent sign internally. Momentum updates damp v by eta = exp(-gamma*h); the
kick runs before the drift, so x advances with the already-kicked velocity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

KINDS = ("sgd", "hb", "nag", "strang", "euler")

# Iterations of flat stepsize before inverse-linear decay begins, in epochs.
WARMUP_EPOCHS = 20


def _frozen_vector(a) -> np.ndarray:
    out = np.array(a, dtype=np.float64, ndmin=1)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class OptimizerState:
    """Phase point: position, momentum, global iteration counter."""

    x: np.ndarray
    v: np.ndarray
    k: int = 0

    def __post_init__(self):
        object.__setattr__(self, "x", _frozen_vector(self.x))
        object.__setattr__(self, "v", _frozen_vector(self.v))
        if self.x.shape != self.v.shape:
            raise ValueError("x and v must have the same shape")


def initial_state(x0, v0=None) -> OptimizerState:
    x0 = np.atleast_1d(np.asarray(x0, dtype=np.float64))
    if v0 is None:
        v0 = np.zeros_like(x0)
    return OptimizerState(x=x0, v=v0, k=0)


@dataclass(frozen=True)
class OptimizerKind:
    name: str
    gamma: float = 0.0

    def __post_init__(self):
        name = self.name.lower()
        if name not in KINDS:
            raise ValueError(f"unknown optimizer kind {self.name!r}")
        object.__setattr__(self, "name", name)
        if name == "sgd":
            object.__setattr__(self, "gamma", 0.0)
        else:
            g = float(self.gamma)
            if not (math.isfinite(g) and g > 0):
                raise ValueError("momentum methods need friction gamma > 0")
            object.__setattr__(self, "gamma", g)

    @property
    def uses_momentum(self) -> bool:
        return self.name != "sgd"


def sgd_step(state: OptimizerState, g, h: float) -> OptimizerState:
    return OptimizerState(x=state.x - h * g, v=state.v, k=state.k + 1)


def hb_step(state: OptimizerState, g, h: float, gamma: float) -> OptimizerState:
    eta = math.exp(-gamma * h)
    vh = eta * state.v
    x_new = (state.x + h * vh) - (h * h) * g
    v_new = vh - h * g
    return OptimizerState(x=x_new, v=v_new, k=state.k + 1)


def nag_step(state: OptimizerState, grad_fn, h: float, gamma: float) -> OptimizerState:
    """Heavy-Ball update with the single gradient taken at the drifted point x + h*eta*v."""
    eta = math.exp(-gamma * h)
    vh = eta * state.v
    g = grad_fn(state.x + h * vh)
    x_new = (state.x + h * vh) - (h * h) * g
    v_new = vh - h * g
    return OptimizerState(x=x_new, v=v_new, k=state.k + 1)


def phi_A(state: OptimizerState, h: float) -> OptimizerState:
    """Exact drift flow for time h (h may be negative). Leaves k untouched."""
    return OptimizerState(x=state.x + h * state.v, v=state.v, k=state.k)


def phi_B(state: OptimizerState, g, h: float, gamma: float) -> OptimizerState:
    """Exact kick flow: damp v and absorb the gradient impulse. Leaves k untouched."""
    eta = math.exp(-gamma * h)
    return OptimizerState(x=state.x, v=eta * state.v - h * g, k=state.k)


def strang_step(state: OptimizerState, grad_fn, h: float, gamma: float) -> OptimizerState:
    """Half drift, full kick (gradient at the half-drifted x), half drift.

    h may be negative so a step can be undone; gamma = 0 makes the map an
    exact involution under h -> -h.
    """
    hh = 0.5 * h
    eta = math.exp(-gamma * h)
    x_mid = state.x + hh * state.v
    g = grad_fn(x_mid)
    v_new = eta * state.v - h * g
    return OptimizerState(x=x_mid + hh * v_new, v=v_new, k=state.k + 1)


def euler_step(state: OptimizerState, g, h: float, gamma: float) -> OptimizerState:
    """First-order explicit discretization: both updates read the old velocity."""
    x_new = state.x + h * state.v
    v_new = (1.0 - gamma * h) * state.v - h * g
    return OptimizerState(x=x_new, v=v_new, k=state.k + 1)


@dataclass(frozen=True)
class Constant:
    h: float

    def __post_init__(self):
        if not (math.isfinite(self.h) and self.h > 0):
            raise ValueError("stepsize must be positive and finite")


@dataclass(frozen=True)
class InverseDecay:
    """Flat at 1/L for WARMUP_EPOCHS*R iterations, then decays like R/(L*delta*k)."""

    L: float
    delta: float
    R: int

    def __post_init__(self):
        if not (math.isfinite(self.L) and self.L > 0):
            raise ValueError("L must be positive and finite")
        if not (math.isfinite(self.delta) and self.delta >= 0):
            raise ValueError("delta must be nonnegative")
        if self.R < 1:
            raise ValueError("R must be at least 1")


def stepsize_at(schedule, k: int) -> float:
    if k < 0:
        raise ValueError("iteration index must be nonnegative")
    if isinstance(schedule, Constant):
        return schedule.h
    if isinstance(schedule, InverseDecay):
        lag = max(0, k - WARMUP_EPOCHS * schedule.R)
        return 1.0 / (schedule.L * (1.0 + schedule.delta * lag / schedule.R))
    raise TypeError(f"unknown schedule type {type(schedule).__name__}")


def lyapunov(x, v, obj, x_star, f_star: float, gamma: float, h: float) -> float:
    """Energy combining suboptimality, squared distance, cross term, and kinetic term.

    gamma_h = (1 - eta)/(h*eta) with eta = exp(-h*gamma); positive-definite in
    (x - x_star, v) for any gamma, h > 0.
    """
    if h <= 0 or gamma <= 0:
        raise ValueError("need h > 0 and gamma > 0")
    x = np.asarray(x, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    eta = math.exp(-h * gamma)
    gamma_h = -math.expm1(-h * gamma) / (h * eta)
    dx = x - np.asarray(x_star, dtype=np.float64)
    return (
        obj.value(x)
        - f_star
        + 0.25 * gamma_h**2 * float(dx @ dx)
        + 0.5 * gamma_h * float(dx @ v)
        + 0.5 * float(v @ v)
    )
