import numpy as np
import pytest

from graphvortex import validate_graph


@pytest.fixture
def two_vertex():
    # the 2-vertex hand-oracle graph: ids a,b; one unit edge; mu = 1
    return validate_graph([("a", 1.0), ("b", 1.0)], [("a", "b", 1.0)])


@pytest.fixture
def two_vertex_mu10():
    return validate_graph([("a", 10.0), ("b", 10.0)], [("a", "b", 1.0)])


def random_values(rng, n, scale=1.0):
    return np.array([rng.uniform(-scale, scale) for _ in range(n)])
