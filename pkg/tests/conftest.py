import numpy as np
import pytest

from qwgates.graph import Graph, Vertex


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def random_graph(rng, n=4, density=1.0, scale=0.5):
    energies = np.sort(rng.uniform(0.0, 5.0, n))
    verts = [Vertex(str(i), float(e)) for i, e in enumerate(energies)]
    couplings = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() <= density:
                g = complex(rng.normal(), rng.normal()) * scale
                couplings.append((str(j), str(i), g))
    return Graph.build(verts, couplings)
