"""Explanatory network statistics: full evaluation and change scores.

Every statistic is available two ways: evaluated from scratch on a graph
(`evaluate_statistics`) and as the incremental change from toggling one dyad
(`change_statistics`, delegated to the active kernel).  Geometrically weighted
statistics use the curved-family form with the leading e^tau factor,

    gw(x) = e^tau * sum_{c >= 1} [1 - (1 - e^{-tau})^c] * x_c,

applied to degree counts (gwd) or shared-partner counts (gwesp/gwnsp/gwdsp).
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _termcodes, kernel
from .errors import DataError, ModelValidationError
from .graph import NodeAttributes

DEFAULT_TAU = 0.75

_GW_KINDS = ("gwd", "gwesp", "gwnsp", "gwdsp")
_ALL_KINDS = ("edges", "twopath", "kcycle", "kdegree") + _GW_KINDS + ("nodematch",)

_KIND_CODES = {
    "edges": _termcodes.EDGES,
    "twopath": _termcodes.TWOPATH,
    "kdegree": _termcodes.KDEGREE,
    "gwd": _termcodes.GWD,
    "gwesp": _termcodes.GWESP,
    "gwnsp": _termcodes.GWNSP,
    "gwdsp": _termcodes.GWDSP,
    "nodematch": _termcodes.NODEMATCH,
}

# Statistics that take integer values on every graph.
INTEGER_KINDS = frozenset({"edges", "twopath", "kcycle", "kdegree", "nodematch"})


@dataclass(frozen=True)
class TermSpec:
    """One explanatory statistic: a kind plus its parameter, if any."""

    kind: str
    k: int = None
    tau: float = None
    attribute: str = None

    def label(self):
        if self.kind in ("kcycle", "kdegree"):
            return f"{self.kind}:{self.k}"
        if self.kind in _GW_KINDS:
            return f"{self.kind}:{self.tau:g}"
        if self.kind == "nodematch" and self.attribute:
            return f"nodematch:{self.attribute}"
        return self.kind

    def __str__(self):
        return self.label()


def edges():
    return TermSpec("edges")


def twopath():
    return TermSpec("twopath")


def kcycle(k):
    return TermSpec("kcycle", k=int(k))


def kdegree(k):
    return TermSpec("kdegree", k=int(k))


def gwd(tau=DEFAULT_TAU):
    return TermSpec("gwd", tau=float(tau))


def gwesp(tau=DEFAULT_TAU):
    return TermSpec("gwesp", tau=float(tau))


def gwnsp(tau=DEFAULT_TAU):
    return TermSpec("gwnsp", tau=float(tau))


def gwdsp(tau=DEFAULT_TAU):
    return TermSpec("gwdsp", tau=float(tau))


def nodematch(attribute=None):
    return TermSpec("nodematch", attribute=attribute)


@dataclass(frozen=True)
class ModelSpec:
    """Ordered, duplicate-free term list; term order fixes every coordinate."""

    terms: tuple

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))

    @property
    def p(self):
        return len(self.terms)

    def labels(self):
        return [t.label() for t in self.terms]

    def to_string(self):
        return ",".join(self.labels())

    def __str__(self):
        return self.to_string()

    def index_of(self, kind):
        for i, t in enumerate(self.terms):
            if t.kind == kind:
                return i
        return None

    def drop(self, index):
        return ModelSpec(self.terms[:index] + self.terms[index + 1 :])


def best_assessment(tau=DEFAULT_TAU):
    """Connectedness + local clustering + global efficiency preset."""
    return ModelSpec((edges(), gwesp(tau), gwnsp(tau)))


def full_candidate(tau=DEFAULT_TAU, attribute=None):
    """The full seven-term candidate model, one metric per category."""
    return ModelSpec(
        (edges(), twopath(), gwesp(tau), gwdsp(tau), gwnsp(tau), gwd(tau),
         nodematch(attribute))
    )


def parse_term(text, default_tau=DEFAULT_TAU):
    """Parse one `name[:param]` item of the term grammar."""
    text = text.strip()
    name, _, arg = text.partition(":")
    name = name.strip().lower()
    arg = arg.strip()
    if name == "edges":
        return edges()
    if name == "twopath":
        return twopath()
    if name == "kcycle":
        if not arg:
            raise DataError("kcycle requires a cycle length, e.g. kcycle:3")
        return kcycle(int(arg))
    if name == "kdegree":
        if not arg:
            raise DataError("kdegree requires a degree, e.g. kdegree:1")
        return kdegree(int(arg))
    if name in _GW_KINDS:
        tau = float(arg) if arg else default_tau
        return TermSpec(name, tau=tau)
    if name == "nodematch":
        return nodematch(arg or None)
    raise DataError(f"unknown term {text!r}")


def parse_terms(text, default_tau=DEFAULT_TAU):
    """Parse a comma-separated term list into a ModelSpec."""
    items = [s for s in text.split(",") if s.strip()]
    if not items:
        raise DataError("empty term list")
    return ModelSpec(tuple(parse_term(s, default_tau) for s in items))


def validate_model(model, n, attrs=None):
    """Return a list of diagnostics; empty means the model is usable."""
    diags = []
    if not model.terms:
        diags.append("model has no terms")
    seen = set()
    for t in model.terms:
        lab = t.label()
        if lab in seen:
            diags.append(f"duplicate term {lab}")
        seen.add(lab)
        if t.kind not in _ALL_KINDS:
            diags.append(f"unknown term kind {t.kind!r}")
        elif t.kind == "kcycle":
            if t.k not in (3, 4):
                diags.append(f"kcycle supports k in {{3, 4}}, got {t.k}")
        elif t.kind == "kdegree":
            if t.k is None or t.k < 0:
                diags.append(f"kdegree requires k >= 0, got {t.k}")
            elif t.k >= n:
                diags.append(f"kdegree:{t.k} impossible on {n} nodes")
        elif t.kind in _GW_KINDS:
            if t.tau is None or not (t.tau > 0):
                diags.append(f"{t.kind} requires decay tau > 0, got {t.tau}")
        elif t.kind == "nodematch":
            if attrs is None:
                diags.append("nodematch requires node attributes")
            else:
                if attrs.n != n:
                    diags.append(
                        f"attribute {attrs.name!r} has {attrs.n} values "
                        f"for {n} nodes"
                    )
                if t.attribute and t.attribute != attrs.name:
                    diags.append(
                        f"nodematch wants attribute {t.attribute!r} but "
                        f"{attrs.name!r} was supplied"
                    )
    return diags


def require_valid(model, n, attrs=None):
    diags = validate_model(model, n, attrs)
    if diags:
        raise ModelValidationError(diags)


def compile_terms(model, attrs=None):
    """Lower a model to the kernel encoding: (kind codes, params, attr codes)."""
    kinds = np.empty(model.p, dtype=np.int64)
    params = np.zeros(model.p, dtype=np.float64)
    attr_codes = np.empty(0, dtype=np.int64)
    for t in model.terms:
        if t.kind == "nodematch":
            if attrs is None:
                raise ModelValidationError(["nodematch requires node attributes"])
            attr_codes = attrs.codes()
            break
    for idx, t in enumerate(model.terms):
        if t.kind == "kcycle":
            kinds[idx] = _termcodes.KCYCLE3 if t.k == 3 else _termcodes.KCYCLE4
        else:
            kinds[idx] = _KIND_CODES[t.kind]
        if t.kind in _GW_KINDS:
            params[idx] = t.tau
        elif t.kind == "kdegree":
            params[idx] = float(t.k)
    return kinds, params, attr_codes


def _gw_weights(tau, size):
    """w[c] = e^tau * (1 - (1 - e^{-tau})^c); w[0] = 0."""
    u = 1.0 - math.exp(-tau)
    c = np.arange(size, dtype=np.float64)
    return math.exp(tau) * (1.0 - np.power(u, c))


def evaluate_statistics(model, g, attrs=None):
    """Evaluate every model term on the graph, from scratch."""
    require_valid(model, g.n, attrs)
    out = np.zeros(model.p, dtype=np.float64)
    cache = {}

    def sp():
        if "sp" not in cache:
            cache["sp"] = g.shared_partner_distributions()
        return cache["sp"]

    def degree_counts():
        if "dc" not in cache:
            cache["dc"] = g.degree_distribution()
        return cache["dc"]

    for idx, t in enumerate(model.terms):
        if t.kind == "edges":
            out[idx] = g.m
        elif t.kind == "twopath":
            out[idx] = int((g.deg * (g.deg - 1) // 2).sum())
        elif t.kind == "kcycle" and t.k == 3:
            out[idx] = g.triangle_count()
        elif t.kind == "kcycle":
            cn = g.common_neighbor_matrix()
            tr4 = int((cn.astype(np.int64) ** 2).sum())
            twop = int((g.deg * (g.deg - 1) // 2).sum())
            out[idx] = (tr4 - 2 * g.m - 4 * twop) // 8
        elif t.kind == "kdegree":
            counts = degree_counts()
            out[idx] = counts[t.k] if t.k < len(counts) else 0
        elif t.kind == "gwd":
            counts = degree_counts()
            out[idx] = float(_gw_weights(t.tau, len(counts)) @ counts)
        elif t.kind == "gwesp":
            d = sp()
            out[idx] = float(_gw_weights(t.tau, len(d.esp)) @ d.esp)
        elif t.kind == "gwnsp":
            d = sp()
            out[idx] = float(_gw_weights(t.tau, len(d.nsp)) @ d.nsp)
        elif t.kind == "gwdsp":
            d = sp()
            out[idx] = float(_gw_weights(t.tau, len(d.dsp)) @ d.dsp)
        elif t.kind == "nodematch":
            codes = attrs.codes()
            iu, ju = np.nonzero(np.triu(g.adj, 1))
            ci, cj = codes[iu], codes[ju]
            out[idx] = int(((ci >= 0) & (ci == cj)).sum())
    return out


def change_statistics(model, g, i, j, attrs=None):
    """Change in every statistic from setting dyad (i, j), minus unsetting it.

    Independent of the dyad's current state; computed incrementally by the
    active kernel.
    """
    if i == j:
        raise DataError(f"dyad ({i},{j}) is a self-loop")
    require_valid(model, g.n, attrs)
    kinds, params, attr_codes = compile_terms(model, attrs)
    return kernel.change_stats(g.adj, g.deg, attr_codes, kinds, params, i, j)


def dyad_change_matrix(model, g, attrs=None):
    """Stack change scores for all dyads (row-major i < j order)."""
    kinds, params, attr_codes = compile_terms(model, attrs)
    return kernel.all_change_stats(g.adj, g.deg, attr_codes, kinds, params)


def dyad_indicators(g):
    """Edge indicator per dyad, aligned with dyad_change_matrix rows."""
    iu, ju = np.triu_indices(g.n, 1)
    return g.adj[iu, ju].astype(np.float64)
