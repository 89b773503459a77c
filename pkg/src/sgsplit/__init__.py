"""Minibatching strategies for stochastic gradient methods, treated as
randomized operator splittings: step maps, closed-form bias formulas for the
scalar model problem, and a Monte-Carlo experiment harness."""

from . import analytic, batching, core, harness, objectives, optimizers
from .core import PACKAGE_VERSION as __version__

__all__ = [
    "analytic",
    "batching",
    "core",
    "harness",
    "objectives",
    "optimizers",
    "__version__",
]
