import random
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ergmkit import terms
from ergmkit.graph import Graph

import oracles


@pytest.fixture
def rng():
    return random.Random(20240901)


def make_graph(rng, n, density):
    return Graph.from_edges(n, oracles.random_graph(rng, n, density))


@pytest.fixture
def small_graphs(rng):
    """A spread of random graphs with n <= 8 across three densities."""
    out = []
    for density in (0.2, 0.5, 0.8):
        for _ in range(12):
            n = rng.randint(3, 8)
            out.append(make_graph(rng, n, density))
    return out


@pytest.fixture(scope="session")
def enum6():
    """All 2^15 graphs on 6 nodes with edges+gwesp statistics."""
    from ergmkit import exact

    model = terms.ModelSpec((terms.edges(), terms.gwesp(0.75)))
    return model, exact.all_graphs_stat_matrix(model, 6)


def path_graph(k):
    return Graph.from_edges(k, [(i, i + 1) for i in range(k - 1)])


def complete_graph(k):
    return Graph.from_edges(k, [(i, j) for i in range(k) for j in range(i + 1, k)])


def star_graph(k):
    return Graph.from_edges(k, [(0, i) for i in range(1, k)])


def cycle_graph(k):
    return Graph.from_edges(k, [(i, (i + 1) % k) for i in range(k)])


def ring_lattice(n, half_k, rewire=0.0, seed=7):
    """Small-world construction: ring lattice plus random rewiring."""
    rng_ = random.Random(seed)
    edges = set()
    for i in range(n):
        for d in range(1, half_k + 1):
            a, b = i, (i + d) % n
            edges.add((min(a, b), max(a, b)))
    edges = list(edges)
    out = set(edges)
    for e in edges:
        if rng_.random() < rewire:
            out.discard(e)
            while True:
                a = rng_.randrange(n)
                b = rng_.randrange(n)
                if a != b and (min(a, b), max(a, b)) not in out:
                    out.add((min(a, b), max(a, b)))
                    break
    return Graph.from_edges(n, sorted(out))
