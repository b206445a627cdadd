"""Command-line front end for the full pipeline.

Exit codes: 0 success, 2 usage error, 3 data error, 4 non-convergence or
degeneracy, 5 internal error.  Failures print one machine-parseable line to
stderr: `error:<Class>: <detail>`.  Every subcommand accepts --seed and
records it in its outputs, so identical invocations produce byte-identical
result documents.
"""

import argparse
import os
import sys

import numpy as np

from . import __version__, ingest, netmetrics, results, selection, terms
from .errors import ConvergenceError, DataError, DegeneracyError, ErgmError
from .estimation import EstimationControl, mcmc_mle, mple
from .gof import gof_plot_data, gof_run
from .sampler import SamplerControl, sample

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NONCONVERGENCE = 4
EXIT_INTERNAL = 5


def _add_seed(p):
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")


def _add_sampler_flags(p):
    p.add_argument("--burn-in", type=int, default=None, help="proposals before sampling")
    p.add_argument("--interval", type=int, default=None, help="proposals between samples")
    p.add_argument("--samples", type=int, default=None, help="retained sample count")
    p.add_argument(
        "--proposal",
        choices=["tie-no-tie", "uniform-dyad"],
        default="tie-no-tie",
        help="proposal distribution",
    )


def _sampler_control(args, defaults=None):
    base = defaults or SamplerControl()
    return SamplerControl(
        burn_in=args.burn_in if args.burn_in is not None else base.burn_in,
        interval=args.interval if args.interval is not None else base.interval,
        sample_count=args.samples if args.samples is not None else base.sample_count,
        proposal=args.proposal,
        seed=args.seed,
        initial=base.initial,
    )


def _estimation_control(args):
    base = EstimationControl()
    mcmc = _sampler_control(args, defaults=base.mcmc)
    return EstimationControl(
        mcmc=mcmc,
        max_newton_iterations=base.max_newton_iterations,
        newton_tolerance=base.newton_tolerance,
        bridge_count=base.bridge_count,
        samples_per_bridge=base.samples_per_bridge,
    )


def _load_network_and_attrs(args):
    g = ingest.read_network(args.network)
    attrs = None
    if getattr(args, "attrs", None):
        attrs = ingest.read_attributes(args.attrs, n=g.n)
    return g, attrs


def _parse_theta(text):
    try:
        return np.array([float(x) for x in text.split(",") if x.strip()])
    except ValueError:
        raise DataError(f"unparseable theta list {text!r}")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ergmkit",
        description="Exponential random graph model engine for undirected networks",
    )
    parser.add_argument("--version", action="version", version=f"ergmkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="estimate model parameters on a network")
    p.add_argument("--network", required=True)
    p.add_argument("--terms", required=True, help="comma-separated term list")
    p.add_argument("--attrs", help="node attribute CSV")
    p.add_argument("--method", choices=["mple", "mcmc"], default="mcmc")
    p.add_argument("--tau", type=float, default=terms.DEFAULT_TAU,
                   help="default decay for geometrically weighted terms")
    p.add_argument("--out", help="result document path")
    _add_seed(p)
    _add_sampler_flags(p)

    p = sub.add_parser("simulate", help="sample networks at fixed parameters")
    p.add_argument("--theta", required=True, help="comma-separated parameter list")
    p.add_argument("--terms", required=True)
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--attrs")
    p.add_argument("--tau", type=float, default=terms.DEFAULT_TAU)
    p.add_argument("--out", required=True, help="output directory")
    _add_seed(p)
    _add_sampler_flags(p)

    p = sub.add_parser("gof", help="goodness of fit of a stored fit result")
    p.add_argument("--fit", required=True, help="fit result document")
    p.add_argument("--network", required=True)
    p.add_argument("--attrs")
    p.add_argument("--out", required=True, help="plot-data document path")
    p.add_argument("--report-out", help="also write the full report document")
    _add_seed(p)
    _add_sampler_flags(p)

    p = sub.add_parser("select", help="run a model-selection procedure")
    p.add_argument("--method", choices=["pvalue", "aic", "graphical"], required=True)
    p.add_argument("--network", required=True)
    p.add_argument("--attrs")
    p.add_argument("--candidates", help="term list (default: full candidate set)")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--strategy", choices=["backward-stepwise", "exhaustive"],
                   default="backward-stepwise", help="AIC search mode")
    p.add_argument("--tau", type=float, default=terms.DEFAULT_TAU)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--gof-samples", type=int, default=100,
                   help="simulations per model for the graphical method")
    p.add_argument("--out", required=True)
    _add_seed(p)
    _add_sampler_flags(p)

    p = sub.add_parser("compare", help="compare two groups of fitted profiles")
    p.add_argument("--group-a", nargs="+", help="fit result documents")
    p.add_argument("--group-b", nargs="+", help="fit result documents")
    p.add_argument("--summary", help="CSV of per-term group summary statistics")
    p.add_argument("--pooled", action="store_true", help="pooled-variance t test")
    p.add_argument("--out", help="optional comparison document path")
    _add_seed(p)

    p = sub.add_parser("threshold", help="threshold a weight matrix to a network")
    p.add_argument("--matrix", required=True)
    p.add_argument("--s", type=float, required=True, help="target S = log(n)/log(K)")
    p.add_argument("--absolute", action="store_true", help="threshold |weight|")
    p.add_argument("--out", required=True, help="edge-list network path")
    p.add_argument("--report-out", help="optional threshold report document")
    _add_seed(p)

    p = sub.add_parser("metrics", help="descriptive metrics of a network")
    p.add_argument("--network", required=True)
    p.add_argument("--out", help="optional metric report document")
    _add_seed(p)

    p = sub.add_parser("serve", help="start the HTTP job service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--store", help="directory for persisted result documents")
    _add_seed(p)

    return parser


def _cmd_fit(args):
    g, attrs = _load_network_and_attrs(args)
    model = terms.parse_terms(args.terms, default_tau=args.tau)
    if args.method == "mple":
        fit = mple(model, g, attrs)
        fit.seed = args.seed
    else:
        fit = mcmc_mle(model, g, attrs, control=_estimation_control(args))
    doc = results.fit_to_doc(fit)
    if args.out:
        results.write_result(doc, args.out)
    print(f"method={fit.method} converged={fit.converged} iterations={fit.iterations}")
    for label, th, se, pv in zip(model.labels(), fit.theta_hat, fit.se, fit.wald_p):
        print(f"  {label:<16} {th:>10.4f}  (se {se:.4f}, p {pv:.4g})")
    print(f"loglik={fit.loglik:.4f} ({fit.loglik_kind})  aic={fit.aic:.4f}")
    return EXIT_OK


def _cmd_simulate(args):
    model = terms.parse_terms(args.terms, default_tau=args.tau)
    theta = _parse_theta(args.theta)
    attrs = ingest.read_attributes(args.attrs, n=args.nodes) if args.attrs else None
    control = _sampler_control(args)
    batch = sample(model, theta, args.nodes, attrs=attrs, control=control)
    os.makedirs(args.out, exist_ok=True)
    for idx, g in enumerate(batch.graphs):
        ingest.write_network(g, os.path.join(args.out, f"sample_{idx:03d}.txt"))
    doc = results.batch_to_doc(batch, model, theta, args.nodes, args.seed)
    results.write_result(doc, os.path.join(args.out, "batch.json"))
    dens = np.mean([g.density for g in batch.graphs])
    print(
        f"retained {len(batch.graphs)} networks  mean density {dens:.4f}  "
        f"acceptance {batch.acceptance_rate:.3f}"
    )
    return EXIT_OK


def _cmd_gof(args):
    fit = results.fit_from_doc(results.read_result(args.fit))
    g, attrs = _load_network_and_attrs(args)
    control = _sampler_control(args)
    report = gof_run(fit, g, attrs=attrs, control=control)
    results.write_result(gof_plot_data(report), args.out)
    if args.report_out:
        results.write_result(report, args.report_out)
    for panel in report.panels:
        print(f"  {panel.name:<14} coverage {panel.coverage:.3f}")
    print(f"overall score {report.overall_score:.3f}")
    return EXIT_OK


def _cmd_select(args):
    g, attrs = _load_network_and_attrs(args)
    if args.candidates:
        cand_model = terms.parse_terms(args.candidates, default_tau=args.tau)
    else:
        attribute = attrs.name if attrs is not None else None
        cand_model = terms.full_candidate(tau=args.tau, attribute=attribute)
        if attrs is None:
            cand_model = terms.ModelSpec(
                tuple(t for t in cand_model.terms if t.kind != "nodematch")
            )
    cand = selection.CandidateSet(
        terms=cand_model, alpha=args.alpha, strategy=args.strategy
    )
    control = _estimation_control(args)
    if args.method == "pvalue":
        trace = selection.backward_pvalue_select(cand, g, attrs, control)
    elif args.method == "aic":
        trace = selection.aic_select(cand, g, attrs, control, threads=args.threads)
    else:
        gof_ctl = SamplerControl(sample_count=args.gof_samples)
        trace = selection.graphical_rank(
            cand, g, attrs, control, gof_control=gof_ctl, threads=args.threads
        )
    results.write_result(trace, args.out)
    _print_trace(trace, cand_model)
    return EXIT_OK


def _print_trace(trace, candidates):
    labels = candidates.labels()
    print(f"method={trace.method} steps={len(trace.steps)}")
    header = "  ".join(f"{lab:>14}" for lab in labels)
    print(f"{'step':<28}{header}")
    for step in trace.steps:
        if step.fit is None:
            print(f"{step.decision:<28}(no fit: {step.error})")
            continue
        by_label = dict(zip(step.model.labels(), step.fit.theta_hat))
        cells = "  ".join(
            f"{by_label[lab]:>14.3f}" if lab in by_label else f"{'-':>14}"
            for lab in labels
        )
        print(f"{step.decision:<28}{cells}")
    print(f"final model: {trace.final_model.to_string()}")


def _read_summary_csv(path):
    rows = []
    with open(path) as fh:
        lines = [l.strip() for l in fh if l.strip()]
    header = [c.strip().lower() for c in lines[0].split(",")]
    expected = ["term", "mean_a", "se_a", "n_a", "mean_b", "se_b", "n_b"]
    if header != expected:
        raise DataError(
            f"{path}: summary header must be {','.join(expected)}"
        )
    for line in lines[1:]:
        cells = [c.strip() for c in line.split(",")]
        if len(cells) != 7:
            raise DataError(f"{path}: bad summary row {line!r}")
        rows.append(cells)
    terms_l = [r[0] for r in rows]
    group_a = {
        "terms": terms_l,
        "mean": [float(r[1]) for r in rows],
        "se": [float(r[2]) for r in rows],
        "n": int(rows[0][3]),
    }
    group_b = {
        "terms": terms_l,
        "mean": [float(r[4]) for r in rows],
        "se": [float(r[5]) for r in rows],
        "n": int(rows[0][6]),
    }
    return group_a, group_b


def _cmd_compare(args):
    if args.summary:
        group_a, group_b = _read_summary_csv(args.summary)
    else:
        if not args.group_a or not args.group_b:
            raise DataError("compare needs --summary or both --group-a and --group-b")
        group_a = [results.fit_from_doc(results.read_result(f)) for f in args.group_a]
        group_b = [results.fit_from_doc(results.read_result(f)) for f in args.group_b]
    cmp = selection.group_compare(group_a, group_b, pooled=args.pooled)
    if args.out:
        results.write_result(results.comparison_to_doc(cmp, seed=args.seed), args.out)
    print(f"{'term':<16}{'mean A':>10}{'SE A':>12}{'mean B':>10}{'SE B':>12}{'t':>9}{'p':>12}")
    for i, label in enumerate(cmp.terms):
        ptxt = "< 0.0001" if cmp.p[i] < 1e-4 else f"{cmp.p[i]:.4f}"
        print(
            f"{label:<16}{cmp.mean_a[i]:>10.3f}{cmp.se_a[i]:>12.3e}"
            f"{cmp.mean_b[i]:>10.3f}{cmp.se_b[i]:>12.3e}{cmp.t[i]:>9.3f}{ptxt:>12}"
        )
    return EXIT_OK


def _cmd_threshold(args):
    w = ingest.read_weight_matrix(args.matrix)
    result = ingest.threshold_matrix(w, args.s, absolute=args.absolute)
    ingest.write_network(result.graph, args.out)
    if args.report_out:
        results.write_result(
            results.threshold_to_doc(result, seed=args.seed), args.report_out
        )
    print(
        f"n={result.graph.n} target K={result.target_k:.4f} "
        f"threshold={result.threshold:.6g} achieved K={result.achieved_k:.4f} "
        f"achieved S={result.achieved_s:.4f} m={result.graph.m}"
    )
    return EXIT_OK


def _cmd_metrics(args):
    g = ingest.read_network(args.network)
    report = netmetrics.descriptive_metrics(g)
    if args.out:
        results.write_result(
            results.metrics_to_doc(report, seed=args.seed), args.out
        )
    print(f"{'C':>8}{'L':>8}{'L_harm':>8}{'E_loc':>8}{'E_glob':>8}{'K':>8}{'reach':>8}")
    print(
        f"{report.clustering_coefficient:>8.3f}"
        f"{report.characteristic_path_length:>8.3f}"
        f"{report.harmonic_path_length:>8.3f}"
        f"{report.local_efficiency:>8.3f}"
        f"{report.global_efficiency:>8.3f}"
        f"{report.mean_degree:>8.3f}"
        f"{report.reachable_pair_fraction:>8.3f}"
    )
    return EXIT_OK


def _cmd_serve(args):
    import uvicorn

    from .service import create_app

    app = create_app(threads=args.threads, store_dir=args.store)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


_COMMANDS = {
    "fit": _cmd_fit,
    "simulate": _cmd_simulate,
    "gof": _cmd_gof,
    "select": _cmd_select,
    "compare": _cmd_compare,
    "threshold": _cmd_threshold,
    "metrics": _cmd_metrics,
    "serve": _cmd_serve,
}


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if e.code is not None else EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except (DegeneracyError, ConvergenceError) as e:
        print(f"error:{type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except DataError as e:
        print(f"error:{type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_DATA
    except OSError as e:
        print(f"error:{type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_DATA
    except ErgmError as e:
        print(f"error:{type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as e:  # pragma: no cover - defensive
        print(f"error:{type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
