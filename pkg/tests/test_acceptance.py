"""Acceptance suite: one test per release criterion, at pinned tolerances.

Each test prints a `ACCEPTANCE <n> (<name>): PASS` line (visible with -s);
run as `pytest tests/test_acceptance.py -v -s`.  Criteria with runtime
budgets assert wall-clock time too.  Everything is seeded: reruns are
deterministic on a given kernel, and both kernels produce identical chains.
"""

import math
import random
import time

import numpy as np
import pytest

from ergmkit import exact, ingest, results, terms
from ergmkit.estimation import EstimationControl, log_likelihood, mcmc_mle, mple
from ergmkit.gof import gof_run
from ergmkit.graph import Graph, NodeAttributes
from ergmkit.netmetrics import descriptive_metrics
from ergmkit.sampler import SamplerControl, bernoulli_graph, sample
from ergmkit.selection import (
    CandidateSet,
    aic_select,
    backward_pvalue_select,
    group_compare,
)

import oracles
from conftest import ring_lattice

ALL_TERMS = terms.ModelSpec(
    (
        terms.edges(),
        terms.twopath(),
        terms.kcycle(3),
        terms.kcycle(4),
        terms.kdegree(1),
        terms.gwd(0.75),
        terms.gwesp(0.75),
        terms.gwnsp(0.75),
        terms.gwdsp(0.75),
        terms.nodematch("zone"),
    )
)

EDGES_ONLY = terms.ModelSpec((terms.edges(),))


def _passed(num, name):
    print(f"ACCEPTANCE {num} ({name}): PASS")


def _graph_corpus(count=210):
    rng = random.Random(424242)
    out = []
    densities = (0.2, 0.5, 0.8)
    while len(out) < count:
        n = rng.randint(3, 8)
        d = densities[len(out) % 3]
        g = Graph.from_edges(n, oracles.random_graph(rng, n, d))
        attrs = NodeAttributes("zone", tuple(rng.choice("AB") for _ in range(n)))
        out.append((g, attrs))
    return out


CORPUS = _graph_corpus()


def test_01_statistic_oracle_equivalence():
    t0 = time.monotonic()
    for g, attrs in CORPUS:
        got = terms.evaluate_statistics(ALL_TERMS, g, attrs)
        want = oracles.brute_statistics(ALL_TERMS, g, attrs)
        for lab, a, b in zip(ALL_TERMS.labels(), got, want):
            tol = 0.0 if lab.split(":")[0] in terms.INTEGER_KINDS else 1e-9
            assert abs(a - b) <= tol, (lab, a, b)
    elapsed = time.monotonic() - t0
    assert len(CORPUS) >= 200
    assert elapsed < 10.0, f"criterion 1 took {elapsed:.1f}s"
    _passed(1, "statistic oracle equivalence")


def test_02_change_score_exactness():
    for g, attrs in CORPUS:
        for i in range(g.n):
            for j in range(i + 1, g.n):
                delta = terms.change_statistics(ALL_TERMS, g, i, j, attrs)
                with_e = g.copy()
                if not with_e.has_edge(i, j):
                    with_e.toggle(i, j)
                without = g.copy()
                if without.has_edge(i, j):
                    without.toggle(i, j)
                ref = terms.evaluate_statistics(ALL_TERMS, with_e, attrs) - \
                    terms.evaluate_statistics(ALL_TERMS, without, attrs)
                for lab, a, b in zip(ALL_TERMS.labels(), delta, ref):
                    tol = 0.0 if lab.split(":")[0] in terms.INTEGER_KINDS else 1e-9
                    assert abs(a - b) <= tol, (lab, i, j, a, b)
    _passed(2, "change-score exactness")


def test_03_shared_partner_identities():
    for g, _ in CORPUS:
        sp = g.shared_partner_distributions()
        assert np.array_equal(sp.dsp, sp.esp + sp.nsp)
    # fixed six-node reference vectors
    esp = np.array([1, 5, 1, 0, 0])
    nsp = np.array([1, 4, 3, 0, 0])
    dsp = np.array([2, 9, 4, 0, 0])
    assert np.array_equal(dsp, esp + nsp)
    _passed(3, "shared-partner identities")


def test_04_independent_edge_equivalence():
    t0 = time.monotonic()
    nd = 50 * 49 // 2
    ctl = SamplerControl(burn_in=10 * nd, interval=2 * nd, sample_count=100, seed=404)
    batch = sample(EDGES_ONLY, [0.0], 50, control=ctl)
    dens0 = float(np.mean([g.density for g in batch.graphs]))
    assert abs(dens0 - 0.5) <= 0.02, dens0

    theta = math.log(0.2 / 0.8)
    batch = sample(EDGES_ONLY, [theta], 50, control=ctl)
    dens2 = float(np.mean([g.density for g in batch.graphs]))
    assert abs(dens2 - 0.2) <= 0.02, dens2
    elapsed = time.monotonic() - t0
    assert elapsed < 30.0, f"criterion 4 took {elapsed:.1f}s"
    _passed(4, "independent-edge model equivalence")


def test_05_mple_closed_form():
    rng = random.Random(505)
    checked = 0
    while checked < 20:
        n = rng.randint(10, 40)
        d = rng.choice([0.15, 0.3, 0.5])
        g = Graph.from_edges(n, oracles.random_graph(rng, n, d))
        if g.m == 0 or g.m == g.n_dyads:
            continue
        fit = mple(EDGES_ONLY, g)
        dens = g.density
        assert fit.theta_hat[0] == pytest.approx(
            math.log(dens / (1 - dens)), abs=1e-6
        )
        checked += 1
    _passed(5, "pseudo-likelihood closed form")


def test_06_exact_likelihood_cross_check(enum6):
    model, stat_matrix = enum6
    g = Graph.from_edges(6, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5)])
    s = terms.evaluate_statistics(model, g)
    theta_exact, _ = exact.exact_mle(stat_matrix, s)
    ctl = EstimationControl(
        mcmc=SamplerControl(burn_in=3_000, interval=60, sample_count=2_000, seed=606)
    )
    fit = mcmc_mle(model, g, control=ctl)
    assert np.all(np.abs(fit.theta_hat - theta_exact) < 2 * fit.se)
    ll_exact = exact.exact_loglik(stat_matrix, s, fit.theta_hat)
    assert abs(fit.loglik - ll_exact) < 0.1, (fit.loglik, ll_exact)
    _passed(6, "exact-likelihood cross-check at n=6")


def test_07_parameter_recovery_90_nodes():
    t0 = time.monotonic()
    theta_star = np.array([-3.0, 0.8, -0.3])
    model = terms.best_assessment()
    sim = sample(
        model, theta_star, 90,
        control=SamplerControl(burn_in=150_000, interval=10_000, sample_count=1, seed=707),
    )
    g = sim.graphs[0]
    fit = mcmc_mle(
        model, g,
        control=EstimationControl(
            mcmc=SamplerControl(burn_in=20_000, interval=1_000, sample_count=1_000, seed=708)
        ),
    )
    assert np.all(np.abs(fit.theta_hat - theta_star) < 3 * fit.se), (
        fit.theta_hat, fit.se
    )
    elapsed = time.monotonic() - t0
    assert elapsed < 300.0, f"criterion 7 took {elapsed:.1f}s"
    _passed(7, "parameter recovery at n=90")


def test_08_reference_profile_metric_reproduction():
    t0 = time.monotonic()
    model = terms.ModelSpec(
        (terms.edges(), terms.gwesp(0.75), terms.gwnsp(0.75), terms.gwd(0.75))
    )
    theta = np.array([-4.48, 1.51, -0.15, 1.12])
    ctl = SamplerControl(burn_in=100_000, interval=10_000, sample_count=100, seed=7)
    batch = sample(model, theta, 90, control=ctl)
    reports = [descriptive_metrics(g) for g in batch.graphs]

    means = {
        "C": np.mean([r.clustering_coefficient for r in reports]),
        # the reference path length is the harmonic-mean geodesic: the
        # source rows satisfy L = 1/E_glob exactly (see decisions ledger)
        "L": np.mean([r.harmonic_path_length for r in reports]),
        "E_loc": np.mean([r.local_efficiency for r in reports]),
        "E_glob": np.mean([r.global_efficiency for r in reports]),
        "K": np.mean([r.mean_degree for r in reports]),
    }
    targets = {
        "C": (0.468, 0.03),
        "L": (3.475, 0.20),
        "E_loc": (0.576, 0.03),
        "E_glob": (0.290, 0.02),
        "K": (4.939, 0.40),
    }
    for key, (target, tol) in targets.items():
        assert abs(means[key] - target) <= tol, (key, means[key], target, tol)
    elapsed = time.monotonic() - t0
    assert elapsed < 300.0, f"criterion 8 took {elapsed:.1f}s"
    _passed(8, "reference-profile metric reproduction")


def test_09_group_comparison_reproduction():
    group_a = {
        "terms": ["edges", "gwesp:0.75", "gwnsp:0.75"],
        "mean": [-2.45, 0.89, -0.32],
        "se": [3.95e-1, 1.81e-1, 6.62e-3],
        "n": 5,
    }
    group_b = {
        "terms": ["edges", "gwesp:0.75", "gwnsp:0.75"],
        "mean": [-3.09, 1.14, -0.24],
        "se": [3.47e-1, 1.53e-1, 4.79e-3],
        "n": 5,
    }
    cmp = group_compare(group_a, group_b)
    assert cmp.p[0] == pytest.approx(0.2626, abs=0.03)
    assert cmp.p[1] == pytest.approx(0.3339, abs=0.03)
    assert cmp.p[2] < 0.001
    _passed(9, "group-comparison p-values")


def test_10_thresholding():
    rng = np.random.RandomState(1010)
    w = rng.uniform(-1, 1, size=(90, 90))
    w = (w + w.T) / 2
    np.fill_diagonal(w, 0.0)
    wm = ingest.WeightMatrix.from_array(w)
    result = ingest.threshold_matrix(wm, 2.8)
    assert result.target_k == pytest.approx(90 ** (1 / 2.8), abs=1e-12)
    assert result.target_k == pytest.approx(4.993, abs=0.01)
    # achieved K within one discrete edge-count step (2/n) of the target
    assert abs(result.achieved_k - result.target_k) <= 2.0 / 90 + 1e-12
    ms = [ingest.threshold_matrix(wm, s).graph.m for s in (1.8, 2.2, 2.8, 3.4, 4.0)]
    assert all(a >= b for a, b in zip(ms, ms[1:]))
    _passed(10, "density thresholding")


def test_11_gof_self_consistency_and_contrast():
    # well-specified case: fit the generating model to its own simulate
    model = terms.best_assessment()
    theta_star = np.array([-3.0, 0.8, -0.3])
    sim = sample(
        model, theta_star, 90,
        control=SamplerControl(burn_in=150_000, interval=10_000, sample_count=1, seed=1111),
    )
    g = sim.graphs[0]
    fit = mcmc_mle(
        model, g,
        control=EstimationControl(
            mcmc=SamplerControl(burn_in=20_000, interval=1_000, sample_count=1_000, seed=1112)
        ),
    )
    report = gof_run(
        fit, g, control=SamplerControl(burn_in=100_000, interval=10_000,
                                       sample_count=100, seed=1113)
    )
    assert report.overall_score >= 0.9, report.overall_score
    esp_self = next(p for p in report.panels if p.name == "esp").coverage

    # contrast: an independent-edge fit to a high-clustering graph misses
    # the shared-partner structure
    clustered = ring_lattice(60, 3, rewire=0.10, seed=13)
    fit_e = mple(EDGES_ONLY, clustered)
    fit_e.seed = 1114
    report_e = gof_run(
        fit_e, clustered,
        control=SamplerControl(burn_in=50_000, interval=5_000, sample_count=100, seed=1115),
    )
    esp_edges = next(p for p in report_e.panels if p.name == "esp").coverage
    assert esp_edges < esp_self, (esp_edges, esp_self)
    _passed(11, "goodness-of-fit self-consistency and contrast")


def test_12_selection_procedure_properties():
    g = bernoulli_graph(30, 0.12, seed=1212)
    ctl = EstimationControl(
        mcmc=SamplerControl(burn_in=2_000, interval=40, sample_count=1_200, seed=3)
    )
    cand = CandidateSet(
        terms=terms.ModelSpec((terms.edges(), terms.twopath())), alpha=0.05
    )

    # p-value backward elimination: one term per step, all-significant end
    trace = backward_pvalue_select(cand, g, control=ctl)
    sizes = [s.model.p for s in trace.steps if s.error is None]
    assert all(a - b == 1 for a, b in zip(sizes, sizes[1:]))
    final = trace.final_fit
    assert final.model.p == 1 or all(p <= 0.05 for p in final.wald_p)

    # stepwise AIC: the accepted path never increases
    trace_aic = aic_select(cand, g, control=ctl)
    accepted = [s.fit.aic for s in trace_aic.steps if s.decision.startswith("accepted")]
    assert all(b <= a + 1e-12 for a, b in zip(accepted, accepted[1:]))

    # replay: identical master seeds give byte-identical trace documents
    again = backward_pvalue_select(cand, g, control=ctl)
    assert results.dumps(results.trace_to_doc(again)) == results.dumps(
        results.trace_to_doc(trace)
    )
    again_aic = aic_select(cand, g, control=ctl)
    assert results.dumps(results.trace_to_doc(again_aic)) == results.dumps(
        results.trace_to_doc(trace_aic)
    )
    _passed(12, "selection procedure properties")
