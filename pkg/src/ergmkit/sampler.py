"""Metropolis-Hastings network sampler at fixed parameters.

A chain proposes single-dyad toggles; a toggle is accepted with probability
min(1, exp{s * theta.delta} * q-correction) where delta is the change score of
the dyad, s = +1 for an addition and -1 for a deletion, and the correction
accounts for the tie/no-tie proposal when active.  Running statistic values
are maintained incrementally by the kernel and re-synchronized from a
from-scratch evaluation at every retained sample (and asserted against it in
debug mode).
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import rng, terms
from .errors import DataError, DegeneracyError
from .graph import Graph
from .kernel import KERNEL_NAME, run_chain

PROPOSALS = ("tie-no-tie", "uniform-dyad")
INITIALS = ("observed", "bernoulli", "empty")

# Chain density outside [BOUNDARY_LO, 1 - BOUNDARY_LO] for the whole final
# half of a trace counts as collapse toward a boundary.
BOUNDARY_LO = 0.005
# Window for the monotone-drift rule, in proposals.
MONOTONE_WINDOW = 10_000


@dataclass(frozen=True)
class SamplerControl:
    burn_in: int = 100_000
    interval: int = 10_000
    sample_count: int = 100
    proposal: str = "tie-no-tie"
    seed: int = 0
    initial: str = "observed"

    def validated(self):
        if self.burn_in < 0:
            raise DataError(f"burn_in must be >= 0, got {self.burn_in}")
        if self.interval < 1:
            raise DataError(f"interval must be >= 1, got {self.interval}")
        if self.sample_count < 1:
            raise DataError(f"sample_count must be >= 1, got {self.sample_count}")
        if self.proposal not in PROPOSALS:
            raise DataError(f"proposal must be one of {PROPOSALS}")
        if self.initial not in INITIALS:
            raise DataError(f"initial must be one of {INITIALS}")
        return self


@dataclass
class SampleBatch:
    graphs: list
    stat_trace: np.ndarray  # sample_count x p, aligned with model terms
    acceptance_rate: float
    diagnostics: dict = field(default_factory=dict)


def bernoulli_graph(n, p, seed):
    """Independent-edge graph at density p, from the shared splitmix stream."""
    stream = rng.SplitMix(seed)
    g = Graph(n)
    for i in range(n):
        for j in range(i + 1, n):
            if stream.next_unit() < p:
                g.toggle(i, j)
    return g


def _implied_density(model, theta):
    """Density of the edges-only projection of theta (0.5 if no edges term)."""
    idx = model.index_of("edges")
    if idx is None:
        return 0.5
    return 1.0 / (1.0 + math.exp(-float(theta[idx])))


def _initial_graph(model, theta, n, control, observed):
    mode = control.initial
    if mode == "observed" and observed is None:
        mode = "bernoulli"
    if mode == "observed":
        if observed.n != n:
            raise DataError(
                f"observed graph has {observed.n} nodes, sampler wants {n}"
            )
        return observed.copy()
    if mode == "empty":
        return Graph(n)
    p = min(max(_implied_density(model, theta), 0.0), 1.0)
    return bernoulli_graph(n, p, seed=rng.derive_seeds(control.seed, 1, salt=1)[0])


def degeneracy_check(edge_trace, n_dyads, stride):
    """Inspect an edge-count trace for collapse toward a boundary.

    Returns (ok, reason).  Rules, applied to snapshots taken every `stride`
    proposals:

    - collapse: every snapshot in the final half sits below BOUNDARY_LO (or
      above 1 - BOUNDARY_LO) in density.  Only applied when the low boundary
      is at least one edge (n_dyads * BOUNDARY_LO >= 1) so that tiny graphs,
      where an empty snapshot is ordinary, are exempt.
    - drift: the trailing snapshots spanning MONOTONE_WINDOW proposals are
      strictly monotone toward a boundary (needs >= 5 snapshots in window).
    """
    trace = np.asarray(edge_trace, dtype=np.float64)
    if trace.size == 0:
        raise DataError("degeneracy check needs a non-empty trace")
    if trace.size >= 4 and n_dyads * BOUNDARY_LO >= 1.0:
        final = trace[trace.size // 2 :]
        if np.all(final < BOUNDARY_LO * n_dyads):
            return False, "empty-graph collapse"
        if np.all(final > (1.0 - BOUNDARY_LO) * n_dyads):
            return False, "complete-graph collapse"
    if stride > 0:
        w = int(math.ceil(MONOTONE_WINDOW / stride)) + 1
        if 5 <= w <= trace.size:
            tail = trace[-w:]
            diffs = np.diff(tail)
            if np.all(diffs > 0) and tail[-1] > 0.5 * n_dyads:
                return False, "monotone drift toward complete graph"
            if np.all(diffs < 0) and tail[-1] < 0.5 * n_dyads:
                return False, "monotone drift toward empty graph"
    return True, None


def sample(
    model,
    theta,
    n,
    attrs=None,
    control=None,
    observed=None,
    keep_graphs=True,
    debug=False,
    progress=None,
):
    """Draw `control.sample_count` networks from the model at fixed theta."""
    control = (control or SamplerControl()).validated()
    terms.require_valid(model, n, attrs)
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape != (model.p,):
        raise DataError(
            f"theta has shape {theta.shape}, model has {model.p} terms"
        )

    g = _initial_graph(model, theta, n, control, observed)
    kinds, params, attr_codes = terms.compile_terms(model, attrs)
    edges_arr, edge_pos = g.ensure_edge_index()
    stats = np.array(terms.evaluate_statistics(model, g, attrs), dtype=np.float64)
    state = np.array(rng.derive_seeds(control.seed, 1, salt=2), dtype=np.uint64)
    tnt = 1 if control.proposal == "tie-no-tie" else 0
    nd = g.n_dyads
    total_props = control.burn_in + control.interval * control.sample_count
    done_props = 0
    accepted_total = 0

    def _advance(k):
        nonlocal accepted_total, done_props
        m_new, acc = run_chain(
            g.adj, g.deg, edges_arr, edge_pos, g.m, attr_codes, kinds, params,
            theta, k, tnt, state, stats,
        )
        g.set_edge_count(m_new)
        accepted_total += acc
        done_props += k
        if progress is not None:
            progress(done_props / total_props)

    # Burn-in runs in chunks so the edge-count trace can be inspected.
    burn_trace = []
    stride = 0
    if control.burn_in > 0:
        chunks = min(50, control.burn_in)
        stride = control.burn_in // chunks
        left = control.burn_in
        while left > 0:
            step = min(stride, left)
            _advance(step)
            left -= step
            burn_trace.append(g.m)
        ok, reason = degeneracy_check(burn_trace, nd, stride)
        if not ok:
            raise DegeneracyError(f"degenerate chain during burn-in: {reason}")

    graphs = []
    trace = np.empty((control.sample_count, model.p), dtype=np.float64)
    retained_m = []
    for s in range(control.sample_count):
        _advance(control.interval)
        trace[s] = stats
        retained_m.append(g.m)
        fresh = terms.evaluate_statistics(model, g, attrs)
        if debug:
            if not np.allclose(stats, fresh, rtol=0.0, atol=1e-9):
                raise AssertionError(
                    f"incremental statistics drifted: {stats} vs {fresh}"
                )
        stats[:] = fresh  # re-sync so rounding error cannot accumulate
        if keep_graphs:
            graphs.append(g.copy())

    ok, reason = degeneracy_check(retained_m, nd, control.interval)
    if not ok:
        raise DegeneracyError(f"degenerate chain during sampling: {reason}")

    return SampleBatch(
        graphs=graphs,
        stat_trace=trace,
        acceptance_rate=accepted_total / max(total_props, 1),
        diagnostics={
            "kernel": KERNEL_NAME,
            "seed": control.seed,
            "burn_in_edge_trace": [int(x) for x in burn_trace],
            "retained_edge_counts": [int(x) for x in retained_m],
            "proposal": control.proposal,
        },
    )


def simulate_at(model, theta, n, attrs=None, control=None, observed=None):
    """Convenience wrapper used by the CLI and service."""
    return sample(model, theta, n, attrs=attrs, control=control, observed=observed)


def control_with_seed(control, seed):
    return replace(control, seed=int(seed))
