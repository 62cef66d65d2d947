import numpy as np
import pytest

from annular_dirichlet import radial as rd
from annular_dirichlet.weights import Weight


@pytest.fixture(scope="session")
def unit_weight():
    return Weight.constant(1.0, 1.0, 2.0)


@pytest.fixture(scope="session")
def nitsche_pair():
    # A(1, 2) -> A*(1, 5/4): the critical (Nitsche) configuration for the
    # unit weight, where the radial minimizer is a boundary homeomorphism.
    return rd.AnnulusPair(1.0, 2.0, 1.0, 1.25)


@pytest.fixture(scope="session")
def collapse_pair():
    # A(1, 2) -> A*(1, 3/(2 sqrt 2)): below the Nitsche ratio, so the
    # minimizer collapses onto the inner circle up to radius sqrt(2).
    return rd.AnnulusPair(1.0, 2.0, 1.0, 3.0 / (2.0 * np.sqrt(2.0)))


@pytest.fixture(scope="session")
def conformal_pair():
    return rd.AnnulusPair(1.0, 2.0, 1.0, 2.0)


@pytest.fixture(scope="session")
def nitsche_solution(unit_weight, nitsche_pair):
    return rd.build(unit_weight, nitsche_pair)


@pytest.fixture(scope="session")
def collapse_solution(unit_weight, collapse_pair):
    return rd.build(unit_weight, collapse_pair)


@pytest.fixture(scope="session")
def conformal_solution(unit_weight, conformal_pair):
    return rd.build(unit_weight, conformal_pair)


def closed_form_phi(s, k):
    """Solution family of the characteristic equation for the unit weight."""
    s = np.asarray(s, dtype=float)
    return (s * s - k) / (s * s + k)
