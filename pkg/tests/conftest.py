"""Shared fixtures: the exhaustive small-graph catalog and seeded samplers."""

import numpy as np
import pytest

from gibbs_spectral.gibbs import GibbsSpec, Pinning, exact_partition
from gibbs_spectral.graph import Graph


def atlas_catalog(max_n=7, min_n=1):
    """All connected graphs up to isomorphism with min_n <= n <= max_n."""
    import networkx as nx
    from networkx.generators.atlas import graph_atlas_g

    out = []
    for G in graph_atlas_g():
        n = G.number_of_nodes()
        if n < min_n or n > max_n:
            continue
        if not nx.is_connected(G):
            continue
        out.append(Graph.from_edges(n, [tuple(sorted(e)) for e in G.edges()]))
    return out


def random_connected_graphs(count, n_range=(8, 9), p=0.35, seed=20240817):
    """Seeded random connected graphs (retry sampling until connected)."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        edges = [(i, j) for i in range(n) for j in range(i + 1, n)
                 if rng.random() < p]
        try:
            out.append(Graph.from_edges(n, edges))
        except Exception:
            continue
    return out


def random_pinning(g, spec, rng, p_pin=0.25, min_free=2, tries=50):
    """A random supported pinning leaving at least min_free free vertices."""
    for _ in range(tries):
        items = {}
        for v in g.vertices():
            r = rng.random()
            if r < p_pin / 2:
                items[v] = 1
            elif r < p_pin:
                items[v] = -1
        if g.n - len(items) < min_free:
            continue
        pin = Pinning(items)
        if exact_partition(spec, g, pin) > 0:
            return pin
    return Pinning.empty()


HC_SPECS = [GibbsSpec.hardcore(lam) for lam in (0.3, 1.0, 2.0)]
ISING_SPECS = [GibbsSpec.ising(beta, lam)
               for beta in (0.5, 1.0, 2.0) for lam in (0.5, 1.0)]
ALL_SPECS = HC_SPECS + ISING_SPECS


@pytest.fixture(scope="session")
def catalog_small():
    """Connected graphs with at most 5 vertices (31 graphs)."""
    return atlas_catalog(max_n=5)


@pytest.fixture(scope="session")
def catalog_full():
    """Connected graphs with at most 7 vertices (996 graphs)."""
    return atlas_catalog(max_n=7)
