"""Network, weight-matrix, and attribute readers plus density thresholding.

Weight matrices are thresholded so the resulting mean degree K satisfies
S = log(n)/log(K) for a requested S: the target is K* = n^(1/S) and the
threshold is chosen among the observed weight values so the achieved K is
closest to the target (ties resolved toward the sparser graph; comparison is
strictly-greater so the threshold value itself is excluded).
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .graph import Graph, NodeAttributes


@dataclass
class WeightMatrix:
    n: int
    values: np.ndarray

    @classmethod
    def from_array(cls, a):
        a = np.asarray(a, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DataError(f"weight matrix must be square, got shape {a.shape}")
        if not np.isfinite(a[~np.eye(len(a), dtype=bool)]).all():
            raise DataError("weight matrix contains NaN or infinite entries")
        if len(a) and np.abs(a - a.T).max() > 1e-9:
            raise DataError("weight matrix is not symmetric (tolerance 1e-9)")
        return cls(n=a.shape[0], values=(a + a.T) / 2.0)


@dataclass
class ThresholdResult:
    threshold: float
    graph: Graph
    achieved_k: float
    achieved_s: float
    target_k: float
    s_target: float


def _split_cells(line):
    return line.replace(",", " ").split()


def read_network(path, format="auto"):
    """Read a graph from an adjacency-matrix or edge-list file.

    Matrix files hold a whitespace/comma-separated square 0/1 matrix; an
    asymmetric matrix is symmetrized by logical OR with a warning.  Edge-list
    files start with a header line holding the node count, followed by one
    0-based `i j` pair per line; `#` starts a comment.
    """
    with open(path) as fh:
        raw = fh.readlines()
    lines = []
    for lineno, line in enumerate(raw, start=1):
        body = line.split("#", 1)[0].strip()
        if body:
            lines.append((lineno, body))
    if not lines:
        raise DataError(f"{path}: no data lines")
    if format == "auto":
        format = "edge-list" if len(_split_cells(lines[0][1])) == 1 else "adjacency-matrix"

    if format == "adjacency-matrix":
        rows = []
        for lineno, body in lines:
            cells = _split_cells(body)
            row = []
            for col, cell in enumerate(cells):
                if cell not in ("0", "1"):
                    raise DataError(
                        f"{path}: entry {cell!r} at row {len(rows)}, column {col} "
                        "is not 0/1"
                    )
                row.append(int(cell))
            rows.append(row)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise DataError(f"{path}: matrix is not square ({n} rows)")
        a = np.array(rows, dtype=np.uint8)
        for i in range(n):
            if a[i, i]:
                raise DataError(f"{path}: nonzero diagonal at ({i},{i}) (self-loop)")
        if not np.array_equal(a, a.T):
            warnings.warn(f"{path}: asymmetric adjacency matrix; symmetrizing by OR")
        return Graph.from_adjacency(a | a.T)

    if format == "edge-list":
        lineno, body = lines[0]
        cells = _split_cells(body)
        if len(cells) != 1:
            raise DataError(
                f"{path}:{lineno}: edge-list header must be the node count"
            )
        try:
            n = int(cells[0])
        except ValueError:
            raise DataError(f"{path}:{lineno}: bad node count {cells[0]!r}")
        pairs = []
        for lineno, body in lines[1:]:
            cells = _split_cells(body)
            if len(cells) != 2:
                raise DataError(f"{path}:{lineno}: expected `i j`, got {body!r}")
            try:
                pairs.append((int(cells[0]), int(cells[1])))
            except ValueError:
                raise DataError(f"{path}:{lineno}: unparseable pair {body!r}")
        try:
            return Graph.from_edges(n, pairs)
        except DataError as e:
            raise DataError(f"{path}: {e}")

    raise DataError(f"unknown network format {format!r}")


def write_network(g, path):
    """Write a graph as an edge-list file (header = node count)."""
    with open(path, "w") as fh:
        fh.write(f"{g.n}\n")
        for i, j in g.edge_list():
            fh.write(f"{i} {j}\n")


def read_attributes(path, n=None):
    """Read `node,<name>` CSV into NodeAttributes; every node must appear once."""
    with open(path) as fh:
        raw = [line.strip() for line in fh]
    rows = [r for r in raw if r]
    if not rows:
        raise DataError(f"{path}: empty attribute file")
    header = [c.strip() for c in rows[0].split(",")]
    if len(header) != 2 or header[0].lower() != "node":
        raise DataError(
            f"{path}: header must be `node,<attribute-name>`, got {rows[0]!r}"
        )
    name = header[1]
    seen = {}
    for lineno, row in enumerate(rows[1:], start=2):
        cells = [c.strip() for c in row.split(",")]
        if len(cells) != 2:
            raise DataError(f"{path}:{lineno}: expected `node,label`")
        try:
            node = int(cells[0])
        except ValueError:
            raise DataError(f"{path}:{lineno}: bad node id {cells[0]!r}")
        if node in seen:
            raise DataError(f"{path}: duplicate node id {node}")
        if not cells[1]:
            raise DataError(f"{path}:{lineno}: node {node} has an empty label")
        seen[node] = cells[1]
    count = n if n is not None else (max(seen) + 1 if seen else 0)
    missing = [i for i in range(count) if i not in seen]
    if missing:
        raise DataError(f"{path}: missing node ids: {missing}")
    extra = [i for i in seen if i >= count]
    if extra:
        raise DataError(f"{path}: node ids beyond {count - 1}: {sorted(extra)}")
    return NodeAttributes(name=name, values=tuple(seen[i] for i in range(count)))


def read_weight_matrix(path):
    with open(path) as fh:
        raw = fh.readlines()
    rows = []
    for line in raw:
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        try:
            rows.append([float(c) for c in _split_cells(body)])
        except ValueError:
            raise DataError(f"{path}: unparseable weight row {body!r}")
    if not rows:
        raise DataError(f"{path}: no data lines")
    if any(len(r) != len(rows) for r in rows):
        raise DataError(f"{path}: weight matrix is not square")
    return WeightMatrix.from_array(np.array(rows))


def threshold_matrix(w, s_target, absolute=False):
    """Threshold a weight matrix so mean degree approaches n^(1/s_target).

    Thresholds on raw weights by default; `absolute=True` compares |weight|.
    """
    if s_target <= 1.0:
        raise DataError(f"s_target must exceed 1, got {s_target}")
    if w.n < 3:
        raise DataError(f"thresholding needs at least 3 nodes, got {w.n}")
    vals = np.abs(w.values) if absolute else w.values
    iu, ju = np.triu_indices(w.n, 1)
    weights = vals[iu, ju]
    uniques = np.unique(weights)
    if uniques.size < 2:
        raise DataError("constant weight matrix: no threshold separates edges")

    target_k = w.n ** (1.0 / s_target)
    # candidate thresholds: each distinct value (strictly-greater cut) plus
    # one below the minimum so the complete graph is reachable
    candidates = list(uniques) + [uniques[0] - 1.0]
    best = None
    for t in sorted(candidates, reverse=True):
        m = int((weights > t).sum())
        k = 2.0 * m / w.n
        gap = abs(k - target_k)
        if best is None or gap < best[0]:
            best = (gap, t, m)
    _, threshold, m = best
    mask = vals > threshold
    g = Graph(w.n)
    for i, j in zip(iu[mask[iu, ju]], ju[mask[iu, ju]]):
        g.toggle(int(i), int(j))
    achieved_k = 2.0 * g.m / w.n
    achieved_s = (
        math.log(w.n) / math.log(achieved_k) if achieved_k > 1.0 else math.nan
    )
    return ThresholdResult(
        threshold=float(threshold),
        graph=g,
        achieved_k=achieved_k,
        achieved_s=achieved_s,
        target_k=float(target_k),
        s_target=float(s_target),
    )
