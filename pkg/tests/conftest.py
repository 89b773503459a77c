import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sgsplit.core import RngStream, generate_simdata
from sgsplit.objectives import LogRegObjective, logreg_constants
from sgsplit import harness


@pytest.fixture(scope="session")
def simdata_objective():
    return harness.make_simdata_objective()


@pytest.fixture(scope="session")
def simdata_minimum(simdata_objective):
    return harness.compute_minimizer(simdata_objective)


@pytest.fixture(scope="session")
def small_logreg():
    """16 x 3 synthetic logistic problem, cheap enough for exhaustive checks."""
    ds = generate_simdata(16, 3, RngStream(11))
    _, lam = logreg_constants(ds)
    return LogRegObjective(ds, lam)


@pytest.fixture(scope="session")
def small_logreg_minimum(small_logreg):
    return harness.compute_minimizer(small_logreg)


@pytest.fixture(scope="session")
def artifacts_dir():
    path = Path(__file__).parents[1] / "artifacts"
    path.mkdir(exist_ok=True)
    return path
