"""Model selection procedures and group comparison of fitted profiles.

Three deliberately independent selectors are provided: p-value backward
elimination, AIC search (stepwise or exhaustive), and goodness-of-fit ranking
where the final call belongs to a human.  They may disagree; no reconciliation
is attempted.  Every trace records per-fit seeds derived from one master seed,
so a trace replays bit-identically.
"""

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import t as _tdist

from . import rng, terms
from .errors import ConvergenceError, DataError, DegeneracyError, ErgmError
from .estimation import EstimationControl, mcmc_mle, mple
from .gof import gof_run, gof_score
from .sampler import SamplerControl, sample


def resolve_threads(threads=None):
    env = os.environ.get("ERGMKIT_THREADS")
    if threads is None and env:
        threads = int(env)
    if threads is None:
        threads = os.cpu_count() or 1
    return max(1, int(threads))


@dataclass(frozen=True)
class CandidateSet:
    terms: terms.ModelSpec
    alpha: float = 0.05
    strategy: str = "backward-stepwise"  # AIC search mode

    def validated(self):
        if not self.terms.terms:
            raise DataError("candidate set is empty")
        if not (0.0 < self.alpha < 1.0):
            raise DataError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.strategy not in ("backward-stepwise", "exhaustive"):
            raise DataError(f"unknown AIC strategy {self.strategy!r}")
        return self


@dataclass
class SelectionStep:
    model: terms.ModelSpec
    decision: str
    fit: object = None  # FitResult when the fit succeeded
    error: str = None
    gof: object = None  # GofReport for the graphical method
    score: float = None
    final: bool = False


@dataclass
class SelectionTrace:
    method: str
    steps: list
    final_model: terms.ModelSpec
    final_fit: object
    seed: int
    settings: dict = field(default_factory=dict)


@dataclass(eq=False)
class GroupComparison:
    terms: list
    mean_a: np.ndarray
    se_a: np.ndarray
    n_a: int
    mean_b: np.ndarray
    se_b: np.ndarray
    n_b: int
    t: np.ndarray
    df: np.ndarray
    p: np.ndarray
    pooled: bool

    def __eq__(self, other):
        if not isinstance(other, GroupComparison):
            return NotImplemented
        return all(
            np.array_equal(getattr(self, f), getattr(other, f))
            for f in ("mean_a", "se_a", "mean_b", "se_b", "t", "df", "p")
        ) and (self.terms, self.n_a, self.n_b, self.pooled) == (
            other.terms,
            other.n_a,
            other.n_b,
            other.pooled,
        )


def _fit_seeded(model, g, attrs, control, seed):
    ctl = EstimationControl(
        mcmc=SamplerControl(
            burn_in=control.mcmc.burn_in,
            interval=control.mcmc.interval,
            sample_count=control.mcmc.sample_count,
            proposal=control.mcmc.proposal,
            seed=int(seed),
            initial=control.mcmc.initial,
        ),
        max_newton_iterations=control.max_newton_iterations,
        newton_tolerance=control.newton_tolerance,
        bridge_count=control.bridge_count,
        samples_per_bridge=control.samples_per_bridge,
    )
    return mcmc_mle(model, g, attrs=attrs, control=ctl)


def backward_pvalue_select(candidates, g, attrs=None, control=None):
    """Drop the least significant term until every survivor clears alpha.

    Exactly one term is removed per step (largest Wald p, ties broken toward
    the smaller |estimate|); no term is protected, and the procedure stops
    when all terms are significant or a single term remains.
    """
    candidates = candidates.validated()
    control = control or EstimationControl()
    master = control.mcmc.seed
    alpha = candidates.alpha
    steps = []
    model = candidates.terms
    step_idx = 0

    def try_fit(mdl):
        nonlocal step_idx
        seed = rng.derive_seeds(master, 1, salt=1000 + step_idx)[0]
        step_idx += 1
        return _fit_seeded(mdl, g, attrs, control, seed)

    # The full model may itself fail; then drop the term whose removal
    # restores convergence, trying in order of pseudo-likelihood p-values.
    fit = None
    while fit is None:
        try:
            fit = try_fit(model)
        except (ConvergenceError, DegeneracyError) as e:
            steps.append(
                SelectionStep(model=model, decision="fit failed", error=str(e))
            )
            if model.p == 1:
                raise ConvergenceError(
                    "no candidate model converged during backward selection"
                )
            order = _mple_drop_order(model, g, attrs)
            recovered = False
            for idx in order:
                reduced = model.drop(idx)
                try:
                    fit = try_fit(reduced)
                except (ConvergenceError, DegeneracyError) as e2:
                    steps.append(
                        SelectionStep(
                            model=reduced, decision="fit failed", error=str(e2)
                        )
                    )
                    continue
                steps.append(
                    SelectionStep(
                        model=model,
                        decision=(
                            f"dropped {model.terms[idx].label()} to restore "
                            "convergence"
                        ),
                    )
                )
                model = reduced
                recovered = True
                break
            if not recovered:
                raise ConvergenceError(
                    "no single-term deletion restored convergence"
                )

    while True:
        worst = _worst_term(fit, alpha)
        if worst is None or model.p == 1:
            steps.append(
                SelectionStep(model=model, decision="final", fit=fit, final=True)
            )
            break
        idx, pval = worst
        steps.append(
            SelectionStep(
                model=model,
                decision=f"dropped {model.terms[idx].label()} (p={pval:.4g})",
                fit=fit,
            )
        )
        model = model.drop(idx)
        fit = try_fit(model)

    return SelectionTrace(
        method="pvalue",
        steps=steps,
        final_model=model,
        final_fit=fit,
        seed=int(master),
        settings={"alpha": alpha},
    )


def _worst_term(fit, alpha):
    """Index and p of the least significant term above alpha, or None."""
    worst = None
    for i, p in enumerate(fit.wald_p):
        if p > alpha:
            if worst is None:
                worst = i
            else:
                pw = fit.wald_p[worst]
                if p > pw or (p == pw and abs(fit.theta_hat[i]) < abs(fit.theta_hat[worst])):
                    worst = i
    return None if worst is None else (worst, float(fit.wald_p[worst]))


def _mple_drop_order(model, g, attrs):
    """Term indices in decreasing pseudo-likelihood p-value order."""
    try:
        f = mple(model, g, attrs)
        return list(np.argsort(-np.asarray(f.wald_p)))
    except ErgmError:
        return list(range(model.p))


def aic_select(candidates, g, attrs=None, control=None, threads=None):
    """AIC search over candidate models.

    "backward-stepwise" (default) repeatedly accepts the single-term deletion
    with the greatest AIC decrease; "exhaustive" fits every non-empty subset.
    All AICs use bridge log-likelihoods anchored at the same edges-only
    reference, so they are comparable.
    """
    candidates = candidates.validated()
    control = control or EstimationControl()
    master = control.mcmc.seed
    steps = []

    if candidates.strategy == "exhaustive":
        if candidates.terms.p > 7:
            raise DataError("exhaustive AIC search is limited to 7 candidate terms")
        subsets = []
        for r in range(candidates.terms.p, 0, -1):
            for combo in itertools.combinations(range(candidates.terms.p), r):
                subsets.append(terms.ModelSpec(tuple(candidates.terms.terms[i] for i in combo)))
        fits = _fit_many(subsets, g, attrs, control, master, threads, salt=2000)
        best = None
        for mdl, fit, err in fits:
            if err is not None:
                steps.append(SelectionStep(model=mdl, decision="fit failed", error=err))
                continue
            steps.append(
                SelectionStep(model=mdl, decision=f"aic={fit.aic:.3f}", fit=fit)
            )
            if best is None or fit.aic < best[1].aic:
                best = (mdl, fit)
        if best is None:
            raise ConvergenceError("every candidate subset failed to converge")
        steps.append(
            SelectionStep(model=best[0], decision="final", fit=best[1], final=True)
        )
        return SelectionTrace(
            method="aic",
            steps=steps,
            final_model=best[0],
            final_fit=best[1],
            seed=int(master),
            settings={"strategy": "exhaustive"},
        )

    # backward-stepwise
    model = candidates.terms
    step_idx = 0

    def fit_one(mdl):
        nonlocal step_idx
        seed = rng.derive_seeds(master, 1, salt=2000 + step_idx)[0]
        step_idx += 1
        return _fit_seeded(mdl, g, attrs, control, seed)

    fit = fit_one(model)
    steps.append(SelectionStep(model=model, decision=f"accepted aic={fit.aic:.3f}", fit=fit))
    while model.p > 1:
        best = None
        for i in range(model.p):
            reduced = model.drop(i)
            try:
                cand = fit_one(reduced)
            except (ConvergenceError, DegeneracyError) as e:
                steps.append(
                    SelectionStep(model=reduced, decision="fit failed", error=str(e))
                )
                continue
            steps.append(
                SelectionStep(model=reduced, decision=f"tried aic={cand.aic:.3f}", fit=cand)
            )
            if best is None or cand.aic < best[1].aic:
                best = (reduced, cand)
        if best is None or best[1].aic >= fit.aic:
            break
        model, fit = best
        steps.append(
            SelectionStep(model=model, decision=f"accepted aic={fit.aic:.3f}", fit=fit)
        )
    steps.append(SelectionStep(model=model, decision="final", fit=fit, final=True))
    return SelectionTrace(
        method="aic",
        steps=steps,
        final_model=model,
        final_fit=fit,
        seed=int(master),
        settings={"strategy": "backward-stepwise"},
    )


def _fit_many(models, g, attrs, control, master, threads, salt):
    """Fit several models concurrently; order and seeds are index-determined."""
    seeds = rng.derive_seeds(master, len(models), salt=salt)

    def work(idx):
        try:
            return models[idx], _fit_seeded(models[idx], g, attrs, control, seeds[idx]), None
        except ErgmError as e:
            return models[idx], None, f"{type(e).__name__}: {e}"

    workers = resolve_threads(threads)
    if workers == 1 or len(models) == 1:
        return [work(i) for i in range(len(models))]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(work, range(len(models))))


def default_graphical_candidates(tau=terms.DEFAULT_TAU, attribute=None):
    """Edges plus one shared-partner flavour and optional companions.

    Every model contains the edge count; the shared-partner slot is empty,
    edgewise, or dyadwise; non-edgewise shared partners, degree weighting,
    attribute matching (when attributes exist), and two-paths toggle freely.
    """
    sp_options = [None, terms.gwesp(tau), terms.gwdsp(tau)]
    toggles = [terms.gwnsp(tau), terms.gwd(tau)]
    if attribute is not None:
        toggles.append(terms.nodematch(attribute))
    toggles.append(terms.twopath())
    out = []
    for sp in sp_options:
        for mask in range(1 << len(toggles)):
            tlist = [terms.edges()]
            if sp is not None:
                tlist.append(sp)
            for b, t in enumerate(toggles):
                if mask >> b & 1:
                    tlist.append(t)
            out.append(terms.ModelSpec(tuple(tlist)))
    return out


def graphical_rank(
    candidates,
    g,
    attrs=None,
    control=None,
    models=None,
    gof_control=None,
    threads=None,
):
    """Fit candidate models, score each by simulated goodness of fit, rank.

    The ranking is advisory: the human makes the final call from the attached
    reports.  Models failing a pseudo-likelihood pre-screen or the full fit
    are recorded and skipped.
    """
    control = control or EstimationControl()
    master = control.mcmc.seed
    if models is None:
        attribute = attrs.name if attrs is not None else None
        models = default_graphical_candidates(attribute=attribute)
    steps = []
    screened = []
    for mdl in models:
        try:
            mple(mdl, g, attrs)
            screened.append(mdl)
        except ErgmError as e:
            steps.append(
                SelectionStep(
                    model=mdl,
                    decision="failed pseudo-likelihood pre-screen",
                    error=f"{type(e).__name__}: {e}",
                )
            )
    fits = _fit_many(screened, g, attrs, control, master, threads, salt=3000)
    gof_ctl = gof_control or SamplerControl()
    gof_seeds = rng.derive_seeds(master, len(screened), salt=4000)
    ranked = []
    for idx, (mdl, fit, err) in enumerate(fits):
        if err is not None:
            steps.append(SelectionStep(model=mdl, decision="fit failed", error=err))
            continue
        try:
            ctl = SamplerControl(
                burn_in=gof_ctl.burn_in,
                interval=gof_ctl.interval,
                sample_count=gof_ctl.sample_count,
                proposal=gof_ctl.proposal,
                seed=int(gof_seeds[idx]),
                initial="observed",
            )
            report = gof_run(fit, g, attrs=attrs, control=ctl)
        except ErgmError as e:
            steps.append(
                SelectionStep(
                    model=mdl,
                    decision="goodness-of-fit failed",
                    fit=fit,
                    error=f"{type(e).__name__}: {e}",
                )
            )
            continue
        ranked.append((mdl, fit, report, gof_score(report), idx))

    ranked.sort(key=lambda r: (-r[3], r[4]))
    if not ranked:
        raise ConvergenceError("no candidate model survived fitting and scoring")
    for rank, (mdl, fit, report, score, _) in enumerate(ranked, start=1):
        steps.append(
            SelectionStep(
                model=mdl,
                decision=f"ranked #{rank} (score {score:.3f})",
                fit=fit,
                gof=report,
                score=score,
                final=rank == 1,
            )
        )
    best = ranked[0]
    return SelectionTrace(
        method="graphical",
        steps=steps,
        final_model=best[0],
        final_fit=best[1],
        seed=int(master),
        settings={"candidates": [m.to_string() for m in models],
                  "note": "score is advisory; final choice is human"},
    )


def _summarize_group(group):
    """Normalize a group input to (term labels, mean, se-of-mean, n)."""
    if isinstance(group, dict):
        labels = list(group["terms"])
        mean = np.asarray(group["mean"], dtype=np.float64)
        se = np.asarray(group["se"], dtype=np.float64)
        n = int(group["n"])
        if mean.shape != se.shape or len(labels) != mean.size:
            raise DataError("group summary fields have mismatched lengths")
        return labels, mean, se, n
    fits = list(group)
    if len(fits) < 2:
        raise DataError("raw group input needs at least 2 fits")
    labels = fits[0].model.labels()
    for f in fits[1:]:
        if f.model.labels() != labels:
            raise DataError(
                "group comparison requires the identical model for every fit"
            )
    thetas = np.vstack([f.theta_hat for f in fits])
    mean = thetas.mean(axis=0)
    se = thetas.std(axis=0, ddof=1) / np.sqrt(len(fits))
    return labels, mean, se, len(fits)


def group_compare(group_a, group_b, pooled=False):
    """Per-coordinate two-sample t comparison of fitted parameter profiles.

    Accepts lists of fits (identical model required) or summary inputs of
    (mean, SE of mean, n) per coordinate.  Default is the unpooled Welch test
    with Welch-Satterthwaite degrees of freedom; `pooled=True` uses the
    classic equal-variance test.
    """
    la, ma, sa, na = _summarize_group(group_a)
    lb, mb, sb, nb = _summarize_group(group_b)
    if la != lb:
        raise DataError("groups were fitted with different models")
    if np.any(sa <= 0) or np.any(sb <= 0):
        raise DataError("group standard errors must be positive")

    if pooled:
        # recover sample variances from the SEs of the means
        va = (sa ** 2) * na
        vb = (sb ** 2) * nb
        sp2 = ((na - 1) * va + (nb - 1) * vb) / (na + nb - 2)
        tstat = (ma - mb) / np.sqrt(sp2 * (1.0 / na + 1.0 / nb))
        df = np.full(ma.shape, float(na + nb - 2))
    else:
        var = sa ** 2 + sb ** 2
        tstat = (ma - mb) / np.sqrt(var)
        df = var ** 2 / (sa ** 4 / (na - 1) + sb ** 4 / (nb - 1))
    p = 2.0 * _tdist.sf(np.abs(tstat), df)
    return GroupComparison(
        terms=la,
        mean_a=ma,
        se_a=sa,
        n_a=na,
        mean_b=mb,
        se_b=sb,
        n_b=nb,
        t=tstat,
        df=df,
        p=p,
        pooled=pooled,
    )


def average_profile(fits):
    """Coordinate-wise mean of fitted parameter vectors (identical models)."""
    fits = list(fits)
    if not fits:
        raise DataError("cannot average an empty list of fits")
    labels = fits[0].model.labels()
    for f in fits[1:]:
        if f.model.labels() != labels:
            raise DataError("profile averaging requires the identical model")
    return np.vstack([f.theta_hat for f in fits]).mean(axis=0)


def representative_simulate(model, theta, n, attrs=None, control=None):
    """Simulate networks from an averaged parameter profile."""
    return sample(model, theta, n, attrs=attrs, control=control)
