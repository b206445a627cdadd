"""Descriptive connectome metrics for observed and simulated networks."""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .graph import Graph

METRIC_NAMES = (
    "clustering_coefficient",
    "characteristic_path_length",
    "harmonic_path_length",
    "local_efficiency",
    "global_efficiency",
    "mean_degree",
    "reachable_pair_fraction",
)


@dataclass
class MetricReport:
    clustering_coefficient: float
    characteristic_path_length: float
    harmonic_path_length: float
    local_efficiency: float
    global_efficiency: float
    mean_degree: float
    reachable_pair_fraction: float

    def as_dict(self):
        return {name: getattr(self, name) for name in METRIC_NAMES}


def _global_efficiency_and_l(g):
    """Mean 1/distance over all pairs, mean distance over reachable pairs."""
    nd = g.n_dyads
    inv_sum = 0.0
    dist_sum = 0.0
    reachable = 0
    for s in range(g.n):
        dist = g.bfs_distances(s)
        for t in range(s + 1, g.n):
            d = dist[t]
            if d > 0:
                inv_sum += 1.0 / d
                dist_sum += d
                reachable += 1
    e_glob = inv_sum / nd if nd else 0.0
    l = dist_sum / reachable if reachable else math.nan
    return e_glob, l, reachable / nd if nd else 0.0


def _subgraph_efficiency(g, nodes):
    """Global efficiency of the induced subgraph on `nodes`."""
    k = len(nodes)
    if k < 2:
        return 0.0
    sub = Graph.from_adjacency(g.adj[np.ix_(nodes, nodes)])
    e, _, _ = _global_efficiency_and_l(sub)
    return e


def descriptive_metrics(g):
    """Clustering, path lengths, efficiencies, and mean degree of one graph.

    Two path-length conventions are reported: `characteristic_path_length`
    is the arithmetic mean over reachable pairs only (the reachable-pair
    fraction makes the restriction visible), and `harmonic_path_length` is
    the reciprocal of global efficiency, which penalizes disconnection
    instead of ignoring it.  Local efficiency uses distances within each
    node's neighbour-induced subgraph.
    """
    if g.n < 2:
        raise DataError("metrics need at least 2 nodes")

    # local clustering: connected neighbour pairs / possible, 0 for degree < 2
    c_sum = 0.0
    eloc_sum = 0.0
    for i in range(g.n):
        d = g.deg[i]
        if d >= 2:
            nbrs = np.nonzero(g.adj[i])[0]
            t_i = int(g.adj[np.ix_(nbrs, nbrs)][np.triu_indices(d, 1)].sum())
            c_sum += 2.0 * t_i / (d * (d - 1))
            eloc_sum += _subgraph_efficiency(g, list(nbrs))
    clustering = c_sum / g.n
    e_loc = eloc_sum / g.n

    e_glob, ell, reach = _global_efficiency_and_l(g)
    return MetricReport(
        clustering_coefficient=clustering,
        characteristic_path_length=ell,
        harmonic_path_length=1.0 / e_glob if e_glob > 0 else math.nan,
        local_efficiency=e_loc,
        global_efficiency=e_glob,
        mean_degree=2.0 * g.m / g.n,
        reachable_pair_fraction=reach,
    )


def ensemble_metrics(graphs):
    """Per-metric sample mean and standard error of the mean over a batch."""
    if hasattr(graphs, "graphs"):
        graphs = graphs.graphs
    if not graphs:
        raise DataError("ensemble metrics need a non-empty batch")
    rows = [descriptive_metrics(g).as_dict() for g in graphs]
    out = {}
    for name in METRIC_NAMES:
        vals = np.array([r[name] for r in rows], dtype=np.float64)
        mean = float(vals.mean())
        se = float(vals.std(ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
        out[name] = (mean, se)
    return out
