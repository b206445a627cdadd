"""Graphical goodness of fit: observed distributions against a simulated ensemble.

Four panels are compared: degree, edgewise shared partners, minimum geodesic
distance (with an explicit unreachable bin), and the undirected triad census.
Each panel holds the observed relative frequencies and, per bin, a
five-number summary of the simulated relative frequencies, both raw and on a
logit scale (frequencies are clamped away from 0/1 before the logit so empty
bins plot finitely).  Coverage is the fraction of bins where the observed
value lies inside the simulated [min, max]; the overall score averages the
panel coverages and is decision support for the human, not a verdict.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError
from .sampler import SamplerControl, sample

PANEL_NAMES = ("degree", "esp", "geodesic", "triad_census")

SUMMARY_KEYS = ("min", "q1", "median", "q3", "max")


@dataclass
class GofPanel:
    name: str
    labels: list
    observed: list  # relative frequencies
    observed_logit: list
    summary: dict  # key -> per-bin list, relative-frequency scale
    summary_logit: dict
    coverage: float


@dataclass
class GofReport:
    panels: list
    simulation_count: int
    overall_score: float
    seed: int
    fit_reference: dict
    panel_weights: dict = field(default_factory=dict)


def five_number_summary(values):
    """Min, hinge quartiles (median-of-halves, inclusive), median, max."""
    x = np.sort(np.asarray(values, dtype=np.float64))
    k = x.size

    def med(v):
        s = v.size
        mid = s // 2
        return float(v[mid]) if s % 2 else float((v[mid - 1] + v[mid]) / 2.0)

    half = (k + 1) // 2
    return {
        "min": float(x[0]),
        "q1": med(x[:half]),
        "median": med(x),
        "q3": med(x[k - half :]),
        "max": float(x[-1]),
    }


def _logit(f, eps):
    f = min(max(f, eps), 1.0 - eps)
    return math.log(f / (1.0 - f))


def _degree_counts(g):
    return {int(d): int(c) for d, c in enumerate(np.bincount(g.deg)) if c}


def _esp_counts(g):
    sp = g.shared_partner_distributions()
    return {int(i): int(c) for i, c in enumerate(sp.esp) if c}


def _geodesic_counts(g):
    gd = g.geodesic_distribution()
    out = {int(d): int(c) for d, c in enumerate(gd.counts) if d > 0 and c}
    out["unreachable"] = int(gd.unreachable)
    return out


def _triad_counts(g):
    return {i: int(c) for i, c in enumerate(g.triad_census())}


_EXTRACTORS = {
    "degree": (_degree_counts, lambda g: g.n),
    "esp": (_esp_counts, lambda g: g.m),
    "geodesic": (_geodesic_counts, lambda g: g.n_dyads),
    "triad_census": (_triad_counts, lambda g: g.n * (g.n - 1) * (g.n - 2) // 6),
}


def _panel_bins(name, observed_counts, simulated_counts):
    """Union bin support: 0..max seen for counts-indexed panels."""
    if name == "triad_census":
        return [0, 1, 2, 3]
    numeric = set()
    for c in [observed_counts] + simulated_counts:
        numeric.update(k for k in c if k != "unreachable")
    top = max(numeric) if numeric else 0
    lo = 1 if name == "geodesic" else 0
    bins = list(range(lo, top + 1))
    if name == "geodesic":
        bins.append("unreachable")
    return bins


def _rel_freqs(counts, denom, bins):
    if denom <= 0:
        return [0.0 for _ in bins]
    return [counts.get(b, 0) / denom for b in bins]


def build_report(g_obs, simulated, seed=0, fit_reference=None, panel_weights=None):
    """Assemble a goodness-of-fit report from an observed graph and simulates."""
    if not simulated:
        raise DataError("goodness of fit needs at least one simulated network")
    s_count = len(simulated)
    panels = []
    for name in PANEL_NAMES:
        extract, denom_of = _EXTRACTORS[name]
        obs_counts = extract(g_obs)
        sim_counts = [extract(g) for g in simulated]
        bins = _panel_bins(name, obs_counts, sim_counts)
        eps = 1.0 / (2.0 * len(bins) * s_count)
        obs = _rel_freqs(obs_counts, denom_of(g_obs), bins)
        sims = np.array(
            [_rel_freqs(c, denom_of(g), bins) for c, g in zip(sim_counts, simulated)]
        )
        summary = {k: [] for k in SUMMARY_KEYS}
        covered = 0
        for b in range(len(bins)):
            s = five_number_summary(sims[:, b])
            for k in SUMMARY_KEYS:
                summary[k].append(s[k])
            if s["min"] <= obs[b] <= s["max"]:
                covered += 1
        summary_logit = {
            k: [_logit(v, eps) for v in summary[k]] for k in SUMMARY_KEYS
        }
        panels.append(
            GofPanel(
                name=name,
                labels=[str(b) for b in bins],
                observed=obs,
                observed_logit=[_logit(v, eps) for v in obs],
                summary=summary,
                summary_logit=summary_logit,
                coverage=covered / len(bins),
            )
        )
    weights = dict(panel_weights or {})
    report = GofReport(
        panels=panels,
        simulation_count=s_count,
        overall_score=0.0,
        seed=int(seed),
        fit_reference=dict(fit_reference or {}),
        panel_weights=weights,
    )
    report.overall_score = gof_score(report)
    return report


def gof_run(fit, g_obs, attrs=None, control=None, panel_weights=None):
    """Simulate from a fitted model and compare four observed distributions."""
    if not fit.converged:
        raise DataError("goodness of fit needs a converged fit")
    if fit.n != g_obs.n:
        raise DataError(
            f"fit was computed on {fit.n} nodes but the graph has {g_obs.n}"
        )
    control = control or SamplerControl()
    batch = sample(
        fit.model, fit.theta_hat, g_obs.n, attrs=attrs, control=control,
        observed=g_obs,
    )
    return build_report(
        g_obs,
        batch.graphs,
        seed=control.seed,
        fit_reference={
            "terms": fit.model.labels(),
            "theta": [float(x) for x in fit.theta_hat],
            "method": fit.method,
            "seed": int(fit.seed),
        },
        panel_weights=panel_weights,
    )


def gof_score(report, panel_weights=None):
    """Weighted mean of panel coverages; unweighted by default."""
    weights = panel_weights if panel_weights is not None else report.panel_weights
    total = 0.0
    wsum = 0.0
    for panel in report.panels:
        w = float(weights.get(panel.name, 1.0)) if weights else 1.0
        total += w * panel.coverage
        wsum += w
    return total / wsum if wsum else 0.0


def gof_plot_data(report):
    """Lean plot-data document: per panel and bin, the observed logit value
    and the logit-scale five-number summary, enough to redraw the figures."""
    return {
        "schema_version": 1,
        "kind": "gof_plot_data",
        "seed": report.seed,
        "fit_reference": report.fit_reference,
        "simulation_count": report.simulation_count,
        "panels": [
            {
                "name": p.name,
                "bins": [
                    {
                        "label": p.labels[b],
                        "observed": p.observed[b],
                        "observed_logit": p.observed_logit[b],
                        "min": p.summary_logit["min"][b],
                        "q1": p.summary_logit["q1"][b],
                        "median": p.summary_logit["median"][b],
                        "q3": p.summary_logit["q3"][b],
                        "max": p.summary_logit["max"][b],
                    }
                    for b in range(len(p.labels))
                ],
            }
            for p in report.panels
        ],
    }
