"""Result-document serialization: one JSON schema for every artifact.

Every document carries `schema_version`, `kind`, the originating seed, and
the tool version.  Serialization is deterministic (sorted keys, fixed
indentation): identical inputs and seeds produce byte-identical files.
Floats survive the round trip exactly (shortest-repr encoding).
"""

import json
import math

import numpy as np

from . import __version__, terms
from .errors import SchemaError
from .estimation import FitResult
from .gof import GofPanel, GofReport
from .netmetrics import METRIC_NAMES, MetricReport
from .selection import GroupComparison, SelectionStep, SelectionTrace

SCHEMA_VERSION = 1

KINDS = (
    "fit_result",
    "gof_report",
    "gof_plot_data",
    "selection_trace",
    "metric_report",
    "sample_batch",
    "group_comparison",
    "threshold_report",
)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        x = float(x)
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def _header(kind, seed):
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": kind,
        "tool": f"ergmkit {__version__}",
        "seed": int(seed),
    }


def _expect_kind(doc, kind):
    validate_doc(doc)
    if doc["kind"] != kind:
        raise SchemaError(f"expected a {kind} document, got {doc['kind']!r}")


# -- per-object converters ----------------------------------------------


def fit_to_doc(fit):
    doc = _header("fit_result", fit.seed)
    doc.update(
        {
            "model": fit.model.labels(),
            "theta": _jsonable(fit.theta_hat),
            "se": _jsonable(fit.se),
            "covariance": _jsonable(fit.covariance),
            "loglik": _jsonable(float(fit.loglik)),
            "loglik_kind": fit.loglik_kind,
            "aic": _jsonable(float(fit.aic)),
            "wald_p": _jsonable(fit.wald_p),
            "method": fit.method,
            "converged": bool(fit.converged),
            "iterations": int(fit.iterations),
            "n": int(fit.n),
            "diagnostics": _jsonable(fit.diagnostics),
        }
    )
    return doc


def fit_from_doc(doc):
    _expect_kind(doc, "fit_result")
    return FitResult(
        model=terms.parse_terms(",".join(doc["model"])),
        theta_hat=np.array(doc["theta"], dtype=np.float64),
        se=np.array(doc["se"], dtype=np.float64),
        covariance=np.array(doc["covariance"], dtype=np.float64),
        loglik=doc["loglik"] if doc["loglik"] is not None else math.nan,
        aic=doc["aic"] if doc["aic"] is not None else math.nan,
        wald_p=np.array(doc["wald_p"], dtype=np.float64),
        method=doc["method"],
        loglik_kind=doc["loglik_kind"],
        converged=doc["converged"],
        iterations=doc["iterations"],
        seed=doc["seed"],
        n=doc["n"],
        diagnostics=doc.get("diagnostics", {}),
    )


def gof_to_doc(report):
    doc = _header("gof_report", report.seed)
    doc.update(
        {
            "fit_reference": _jsonable(report.fit_reference),
            "simulation_count": int(report.simulation_count),
            "overall_score": float(report.overall_score),
            "panel_weights": _jsonable(report.panel_weights),
            "panels": [
                {
                    "name": p.name,
                    "labels": list(p.labels),
                    "observed": _jsonable(p.observed),
                    "observed_logit": _jsonable(p.observed_logit),
                    "summary": _jsonable(p.summary),
                    "summary_logit": _jsonable(p.summary_logit),
                    "coverage": float(p.coverage),
                }
                for p in report.panels
            ],
        }
    )
    return doc


def gof_from_doc(doc):
    _expect_kind(doc, "gof_report")
    return GofReport(
        panels=[
            GofPanel(
                name=p["name"],
                labels=list(p["labels"]),
                observed=list(p["observed"]),
                observed_logit=list(p["observed_logit"]),
                summary={k: list(v) for k, v in p["summary"].items()},
                summary_logit={k: list(v) for k, v in p["summary_logit"].items()},
                coverage=p["coverage"],
            )
            for p in doc["panels"]
        ],
        simulation_count=doc["simulation_count"],
        overall_score=doc["overall_score"],
        seed=doc["seed"],
        fit_reference=doc.get("fit_reference", {}),
        panel_weights=doc.get("panel_weights", {}),
    )


def metrics_to_doc(report, seed=0):
    doc = _header("metric_report", seed)
    doc.update({name: _jsonable(getattr(report, name)) for name in METRIC_NAMES})
    return doc


def metrics_from_doc(doc):
    _expect_kind(doc, "metric_report")
    vals = {
        name: (doc[name] if doc[name] is not None else math.nan)
        for name in METRIC_NAMES
    }
    return MetricReport(**vals)


def batch_to_doc(batch, model, theta, n, seed):
    doc = _header("sample_batch", seed)
    doc.update(
        {
            "n": int(n),
            "model": model.labels(),
            "theta": _jsonable(np.asarray(theta)),
            "sample_count": int(batch.stat_trace.shape[0]),
            "acceptance_rate": float(batch.acceptance_rate),
            "stat_trace": _jsonable(batch.stat_trace),
            "edge_counts": [int(g.m) for g in batch.graphs],
            "diagnostics": _jsonable(batch.diagnostics),
        }
    )
    return doc


def comparison_to_doc(cmp, seed=0):
    doc = _header("group_comparison", seed)
    doc.update(
        {
            "terms": list(cmp.terms),
            "group_a": {
                "mean": _jsonable(cmp.mean_a),
                "se": _jsonable(cmp.se_a),
                "n": cmp.n_a,
            },
            "group_b": {
                "mean": _jsonable(cmp.mean_b),
                "se": _jsonable(cmp.se_b),
                "n": cmp.n_b,
            },
            "t": _jsonable(cmp.t),
            "df": _jsonable(cmp.df),
            "p": _jsonable(cmp.p),
            "pooled": bool(cmp.pooled),
        }
    )
    return doc


def comparison_from_doc(doc):
    _expect_kind(doc, "group_comparison")
    return GroupComparison(
        terms=list(doc["terms"]),
        mean_a=np.array(doc["group_a"]["mean"]),
        se_a=np.array(doc["group_a"]["se"]),
        n_a=doc["group_a"]["n"],
        mean_b=np.array(doc["group_b"]["mean"]),
        se_b=np.array(doc["group_b"]["se"]),
        n_b=doc["group_b"]["n"],
        t=np.array(doc["t"]),
        df=np.array(doc["df"]),
        p=np.array(doc["p"]),
        pooled=doc["pooled"],
    )


def trace_to_doc(trace):
    doc = _header("selection_trace", trace.seed)
    doc.update(
        {
            "method": trace.method,
            "settings": _jsonable(trace.settings),
            "final_model": trace.final_model.labels() if trace.final_model else None,
            "steps": [
                {
                    "model": step.model.labels(),
                    "decision": step.decision,
                    "fit": fit_to_doc(step.fit) if step.fit is not None else None,
                    "error": step.error,
                    "gof": gof_to_doc(step.gof) if step.gof is not None else None,
                    "score": _jsonable(step.score),
                    "final": bool(step.final),
                }
                for step in trace.steps
            ],
            "final_fit": fit_to_doc(trace.final_fit) if trace.final_fit else None,
        }
    )
    return doc


def trace_from_doc(doc):
    _expect_kind(doc, "selection_trace")
    steps = [
        SelectionStep(
            model=terms.parse_terms(",".join(s["model"])),
            decision=s["decision"],
            fit=fit_from_doc(s["fit"]) if s.get("fit") else None,
            error=s.get("error"),
            gof=gof_from_doc(s["gof"]) if s.get("gof") else None,
            score=s.get("score"),
            final=s.get("final", False),
        )
        for s in doc["steps"]
    ]
    return SelectionTrace(
        method=doc["method"],
        steps=steps,
        final_model=(
            terms.parse_terms(",".join(doc["final_model"]))
            if doc.get("final_model")
            else None
        ),
        final_fit=fit_from_doc(doc["final_fit"]) if doc.get("final_fit") else None,
        seed=doc["seed"],
        settings=doc.get("settings", {}),
    )


def threshold_to_doc(result, seed=0):
    doc = _header("threshold_report", seed)
    doc.update(
        {
            "n": int(result.graph.n),
            "m": int(result.graph.m),
            "s_target": _jsonable(result.s_target),
            "target_k": _jsonable(result.target_k),
            "threshold": _jsonable(result.threshold),
            "achieved_k": _jsonable(result.achieved_k),
            "achieved_s": _jsonable(result.achieved_s),
        }
    )
    return doc


# -- generic write/read --------------------------------------------------


def to_doc(obj, **kw):
    """Convert any result object (or pass a ready dict through)."""
    if isinstance(obj, dict):
        return obj
    if isinstance(obj, FitResult):
        return fit_to_doc(obj)
    if isinstance(obj, GofReport):
        return gof_to_doc(obj)
    if isinstance(obj, MetricReport):
        return metrics_to_doc(obj, **kw)
    if isinstance(obj, SelectionTrace):
        return trace_to_doc(obj)
    if isinstance(obj, GroupComparison):
        return comparison_to_doc(obj, **kw)
    raise SchemaError(f"cannot serialize object of type {type(obj).__name__}")


def dumps(doc):
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_result(obj, path, **kw):
    doc = to_doc(obj, **kw)
    validate_doc(doc)
    with open(path, "w") as fh:
        fh.write(dumps(doc))
    return doc


def validate_doc(doc):
    if not isinstance(doc, dict):
        raise SchemaError("result document must be a JSON object")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaError(
            f"unsupported schema version {version!r} (expected {SCHEMA_VERSION})"
        )
    kind = doc.get("kind")
    if kind not in KINDS:
        raise SchemaError(f"unknown document kind {kind!r}")
    return doc


def read_result(path):
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise SchemaError(f"{path}: not valid JSON ({e})")
    return validate_doc(doc)
