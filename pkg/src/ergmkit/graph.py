"""Undirected simple graphs with O(1) edge queries and cached degrees.

Node count is bounded (hundreds to ~a thousand), so the adjacency matrix is
stored densely as uint8.  The sampler additionally needs an indexed edge list
(uniform edge selection plus O(1) removal); that index is built lazily and is
maintained in place by the kernels during a chain run.
"""

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class NodeAttributes:
    """A named categorical label per node.

    The label ``"unknown"`` is special: nodes carrying it never count toward
    attribute-match statistics, even when both endpoints are unknown.
    """

    name: str
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(str(v) for v in self.values))

    @property
    def n(self):
        return len(self.values)

    @property
    def alphabet(self):
        return sorted(set(self.values))

    def codes(self):
        """Integer label codes; ``unknown`` maps to -1 (never matches)."""
        known = sorted(v for v in set(self.values) if v != "unknown")
        index = {v: i for i, v in enumerate(known)}
        index["unknown"] = -1
        return np.array([index[v] for v in self.values], dtype=np.int64)


@dataclass
class SharedPartnerDistributions:
    """Counts of unordered pairs by number of common neighbours.

    Index i counts pairs with exactly i shared partners; esp restricts to
    connected pairs, nsp to non-connected pairs, dsp to all pairs.
    """

    esp: np.ndarray
    nsp: np.ndarray
    dsp: np.ndarray


@dataclass
class GeodesicDistribution:
    """Unordered-pair counts by shortest-path length, plus unreachable pairs."""

    counts: np.ndarray  # counts[d] = pairs at distance d; index 0 unused
    unreachable: int

    def as_dict(self):
        out = {d: int(c) for d, c in enumerate(self.counts) if d > 0 and c > 0}
        out["unreachable"] = int(self.unreachable)
        return out

    @property
    def total(self):
        return int(self.counts.sum()) + int(self.unreachable)


class Graph:
    """Mutable undirected simple graph on nodes 0..n-1."""

    __slots__ = ("n", "adj", "deg", "_m", "_edges", "_edge_pos")

    def __init__(self, n):
        if n < 1:
            raise DataError(f"node count must be positive, got {n}")
        self.n = int(n)
        self.adj = np.zeros((n, n), dtype=np.uint8)
        self.deg = np.zeros(n, dtype=np.int64)
        self._m = 0
        self._edges = None
        self._edge_pos = None

    # -- construction -----------------------------------------------------

    @classmethod
    def from_edges(cls, n, edge_list):
        g = cls(n)
        for i, j in edge_list:
            i, j = int(i), int(j)
            if i == j:
                raise DataError(f"self-loop ({i},{j}) is not allowed")
            if not (0 <= i < n and 0 <= j < n):
                raise DataError(f"edge ({i},{j}) has an endpoint outside 0..{n - 1}")
            if not g.adj[i, j]:
                g._set_edge(i, j, True)
        return g

    @classmethod
    def from_adjacency(cls, matrix):
        a = np.asarray(matrix)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DataError(f"adjacency matrix must be square, got shape {a.shape}")
        n = a.shape[0]
        g = cls(n)
        g.adj[:] = (a != 0).astype(np.uint8)
        np.fill_diagonal(g.adj, 0)
        g.adj |= g.adj.T
        g.deg[:] = g.adj.sum(axis=1)
        g._m = int(g.deg.sum()) // 2
        return g

    def copy(self):
        c = Graph.__new__(Graph)
        c.n = self.n
        c.adj = self.adj.copy()
        c.deg = self.deg.copy()
        c._m = self._m
        c._edges = None
        c._edge_pos = None
        return c

    # -- basic queries -----------------------------------------------------

    @property
    def m(self):
        return self._m

    @property
    def n_dyads(self):
        return self.n * (self.n - 1) // 2

    @property
    def density(self):
        return self._m / self.n_dyads if self.n > 1 else 0.0

    def has_edge(self, i, j):
        return bool(self.adj[i, j])

    def neighbors(self, i):
        return np.nonzero(self.adj[i])[0]

    def edge_list(self):
        """Edges as sorted (i, j) pairs with i < j; deterministic order."""
        iu, ju = np.nonzero(np.triu(self.adj, 1))
        return list(zip(iu.tolist(), ju.tolist()))

    def __eq__(self, other):
        return (
            isinstance(other, Graph)
            and self.n == other.n
            and np.array_equal(self.adj, other.adj)
        )

    def __repr__(self):
        return f"Graph(n={self.n}, m={self._m})"

    # -- mutation ----------------------------------------------------------

    def _set_edge(self, i, j, present):
        v = 1 if present else 0
        d = 1 if present else -1
        self.adj[i, j] = v
        self.adj[j, i] = v
        self.deg[i] += d
        self.deg[j] += d
        self._m += d

    def toggle(self, i, j):
        """Flip the state of dyad (i, j) in place."""
        if i == j:
            raise DataError(f"cannot toggle self-loop ({i},{i})")
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise DataError(f"dyad ({i},{j}) out of range")
        self._set_edge(i, j, not self.adj[i, j])
        self._edges = None
        self._edge_pos = None

    # -- sampler state -----------------------------------------------------

    def ensure_edge_index(self):
        """Build (or return) the indexed edge list the kernels mutate.

        edges has capacity for all dyads; rows 0..m-1 are live.  edge_pos maps
        a dyad to its row, -1 if absent.
        """
        if self._edges is None:
            self._edges = np.zeros((self.n_dyads, 2), dtype=np.int64)
            self._edge_pos = np.full((self.n, self.n), -1, dtype=np.int64)
            for pos, (i, j) in enumerate(self.edge_list()):
                self._edges[pos, 0] = i
                self._edges[pos, 1] = j
                self._edge_pos[i, j] = pos
                self._edge_pos[j, i] = pos
        return self._edges, self._edge_pos

    def set_edge_count(self, m):
        """Sync the cached edge count after a kernel mutated the arrays."""
        self._m = int(m)

    # -- distributions -----------------------------------------------------

    def common_neighbor_matrix(self):
        """Pairwise common-neighbour counts (diagonal holds degrees).

        float32 matmul is exact here because counts are bounded by n << 2**24.
        """
        a = self.adj.astype(np.float32)
        return (a @ a).astype(np.int64)

    def degree_distribution(self):
        return np.bincount(self.deg, minlength=self.n)

    def shared_partner_distributions(self):
        cn = self.common_neighbor_matrix()
        iu, ju = np.triu_indices(self.n, 1)
        counts = cn[iu, ju]
        connected = self.adj[iu, ju].astype(bool)
        size = max(self.n - 1, 1)
        esp = np.bincount(counts[connected], minlength=size)[:size]
        nsp = np.bincount(counts[~connected], minlength=size)[:size]
        return SharedPartnerDistributions(esp=esp, nsp=nsp, dsp=esp + nsp)

    def bfs_distances(self, source):
        """Unweighted shortest-path lengths from source; -1 if unreachable."""
        dist = np.full(self.n, -1, dtype=np.int64)
        dist[source] = 0
        queue = deque([source])
        adj = self.adj
        while queue:
            u = queue.popleft()
            du = dist[u]
            for v in np.nonzero(adj[u])[0]:
                if dist[v] < 0:
                    dist[v] = du + 1
                    queue.append(v)
        return dist

    def geodesic_distribution(self):
        counts = np.zeros(self.n, dtype=np.int64)
        unreachable = 0
        for s in range(self.n):
            dist = self.bfs_distances(s)
            for t in range(s + 1, self.n):
                d = dist[t]
                if d < 0:
                    unreachable += 1
                else:
                    counts[d] += 1
        return GeodesicDistribution(counts=counts, unreachable=unreachable)

    def triangle_count(self):
        cn = self.common_neighbor_matrix()
        iu, ju = np.triu_indices(self.n, 1)
        on_edges = cn[iu, ju][self.adj[iu, ju].astype(bool)]
        return int(on_edges.sum()) // 3

    def triad_census(self):
        """Counts of node triples with 0, 1, 2, 3 edges.

        Closed form; the test suite checks it against brute-force triple
        enumeration.
        """
        n, m = self.n, self._m
        t3 = self.triangle_count()
        pairs_at_node = int((self.deg * (self.deg - 1) // 2).sum())
        t2 = pairs_at_node - 3 * t3
        t1 = m * (n - 2) - 2 * t2 - 3 * t3
        total = n * (n - 1) * (n - 2) // 6
        t0 = total - t1 - t2 - t3
        return np.array([t0, t1, t2, t3], dtype=np.int64)


def build_graph(n, edge_list):
    """Validated construction from a (possibly duplicated) pair list."""
    return Graph.from_edges(n, edge_list)


def toggle_edge(g, i, j):
    """Return a copy of g with dyad (i, j) flipped."""
    out = g.copy()
    out.toggle(i, j)
    return out
