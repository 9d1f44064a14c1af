import numpy as np
import pytest

from shadowmd.dynamics import vqe_optimize
from shadowmd.hamiltonian import load_default_table
from shadowmd.statevector import AnsatzConfig
from shadowmd.streams import stream


@pytest.fixture(scope="session")
def table():
    return load_default_table()


@pytest.fixture(scope="session")
def ansatz():
    return AnsatzConfig(4, 4)


@pytest.fixture(scope="session")
def theta_star(table, ansatz):
    """Tightly converged parameters at the equilibrium bond length."""
    init = stream(11, 2).uniform(0.0, 2.0 * np.pi, ansatz.parameter_count)
    return vqe_optimize(table, 0.735, ansatz, init, tol=1e-8)


def random_state_vector(rng, n):
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return v / np.linalg.norm(v)
