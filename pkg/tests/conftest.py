import numpy as np
import pytest

from homotopy_qaoa import WeightedGraph, generate_ba_graph, maxcut_objective


@pytest.fixture
def single_edge_diag():
    """One weight-1 edge on two qubits: energies [+1, -1, -1, +1]."""
    return maxcut_objective(WeightedGraph(n=2, edges=((0, 1, 1),)))


@pytest.fixture
def triangle():
    return WeightedGraph(n=3, edges=((0, 1, 1), (0, 2, 1), (1, 2, 1)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_instance(n, seed):
    return generate_ba_graph(n, 2, np.random.default_rng(seed))


@pytest.fixture
def small_instance():
    return random_instance(6, 7)


def random_state(n, rng):
    psi = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
    return psi / np.linalg.norm(psi)
