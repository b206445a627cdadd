import math

import numpy as np
import pytest

from ergmkit import terms
from ergmkit.errors import DataError, ModelValidationError
from ergmkit.graph import Graph, NodeAttributes, build_graph

import oracles
from conftest import complete_graph, make_graph, path_graph, star_graph

ALL_TERMS = terms.ModelSpec(
    (
        terms.edges(),
        terms.twopath(),
        terms.kcycle(3),
        terms.kcycle(4),
        terms.kdegree(1),
        terms.kdegree(2),
        terms.gwd(0.75),
        terms.gwesp(0.75),
        terms.gwnsp(0.75),
        terms.gwdsp(0.4),
    )
)


def random_attrs(rng, n):
    return NodeAttributes("zone", tuple(rng.choice("ABC") for _ in range(n)))


class TestEvaluateExamples:
    def test_triangle_gwesp_is_three(self):
        # weight of one shared partner is e^tau * e^-tau = 1 and esp[1] = 3
        g = complete_graph(3)
        val = terms.evaluate_statistics(terms.ModelSpec((terms.gwesp(0.75),)), g)
        assert val[0] == pytest.approx(3.0, abs=1e-12)

    def test_star_twopath_and_gwnsp(self):
        g = star_graph(4)
        model = terms.ModelSpec((terms.twopath(), terms.gwnsp(0.3), terms.gwnsp(2.0)))
        val = terms.evaluate_statistics(model, g)
        assert val[0] == 3.0
        # three leaf pairs, one shared partner each: value 3 for any decay
        assert val[1] == pytest.approx(3.0, abs=1e-12)
        assert val[2] == pytest.approx(3.0, abs=1e-12)

    def test_nodematch(self):
        g = build_graph(4, [(0, 1), (0, 2)])
        attrs = NodeAttributes("zone", ("A", "A", "B", "B"))
        model = terms.ModelSpec((terms.nodematch("zone"),))
        assert terms.evaluate_statistics(model, g, attrs)[0] == 1.0

    def test_unknown_label_never_matches(self):
        g = build_graph(4, [(0, 1), (2, 3)])
        attrs = NodeAttributes("zone", ("unknown", "unknown", "B", "B"))
        model = terms.ModelSpec((terms.nodematch("zone"),))
        assert terms.evaluate_statistics(model, g, attrs)[0] == 1.0

    def test_empty_graph_all_zero(self):
        g = Graph(6)
        attrs = NodeAttributes("zone", tuple("AABBAB"))
        model = terms.ModelSpec(ALL_TERMS.terms + (terms.nodematch("zone"),))
        val = terms.evaluate_statistics(model, g, attrs)
        assert np.array_equal(val, np.zeros(model.p))


class TestOracleEquivalence:
    def test_all_terms_match_brute_force(self, rng, small_graphs):
        for g in small_graphs:
            attrs = random_attrs(rng, g.n)
            model = terms.ModelSpec(ALL_TERMS.terms + (terms.nodematch("zone"),))
            got = terms.evaluate_statistics(model, g, attrs)
            want = oracles.brute_statistics(model, g, attrs)
            for lab, a, b in zip(model.labels(), got, want):
                tol = 0.0 if lab.split(":")[0] in terms.INTEGER_KINDS else 1e-9
                assert abs(a - b) <= tol, (lab, a, b)

    def test_gwdsp_is_gwesp_plus_gwnsp(self, small_graphs):
        model = terms.ModelSpec((terms.gwesp(0.75), terms.gwnsp(0.75), terms.gwdsp(0.75)))
        for g in small_graphs:
            esp, nsp, dsp = terms.evaluate_statistics(model, g)
            assert dsp == pytest.approx(esp + nsp, abs=1e-9)


class TestChangeStatistics:
    def test_edges_always_one(self, small_graphs):
        model = terms.ModelSpec((terms.edges(),))
        for g in small_graphs[:5]:
            assert terms.change_statistics(model, g, 0, 1)[0] == 1.0

    def test_path_toggle_gwesp(self):
        g = path_graph(3)
        delta = terms.change_statistics(terms.ModelSpec((terms.gwesp(0.75),)), g, 0, 2)
        assert delta[0] == pytest.approx(3.0, abs=1e-12)

    def test_path_toggle_twopath(self):
        g = path_graph(3)
        delta = terms.change_statistics(terms.ModelSpec((terms.twopath(),)), g, 0, 2)
        assert delta[0] == 2.0

    def test_self_loop_rejected(self):
        with pytest.raises(DataError):
            terms.change_statistics(terms.ModelSpec((terms.edges(),)), path_graph(3), 1, 1)

    def test_matches_from_scratch_difference_everywhere(self, rng, small_graphs):
        model = terms.ModelSpec(ALL_TERMS.terms + (terms.nodematch("zone"),))
        for g in small_graphs:
            attrs = random_attrs(rng, g.n)
            for i in range(g.n):
                for j in range(i + 1, g.n):
                    delta = terms.change_statistics(model, g, i, j, attrs)
                    with_edge = g.copy()
                    if not with_edge.has_edge(i, j):
                        with_edge.toggle(i, j)
                    without = g.copy()
                    if without.has_edge(i, j):
                        without.toggle(i, j)
                    ref = terms.evaluate_statistics(model, with_edge, attrs) - \
                        terms.evaluate_statistics(model, without, attrs)
                    for lab, a, b in zip(model.labels(), delta, ref):
                        tol = 0.0 if lab.split(":")[0] in terms.INTEGER_KINDS else 1e-9
                        assert abs(a - b) <= tol, (lab, i, j, a, b)


class TestValidateModel:
    def test_preset_ok(self):
        assert terms.validate_model(terms.best_assessment(), 90) == []

    def test_duplicate_flagged(self):
        model = terms.ModelSpec((terms.edges(), terms.edges()))
        assert any("duplicate" in d for d in terms.validate_model(model, 5))

    def test_bad_decay_flagged(self):
        model = terms.ModelSpec((terms.TermSpec("gwesp", tau=0.0),))
        assert any("decay" in d for d in terms.validate_model(model, 5))

    def test_kdegree_out_of_range(self):
        model = terms.ModelSpec((terms.kdegree(9),))
        assert any("impossible" in d for d in terms.validate_model(model, 5))

    def test_kcycle_limited(self):
        model = terms.ModelSpec((terms.kcycle(5),))
        assert any("kcycle" in d for d in terms.validate_model(model, 9))

    def test_nodematch_needs_attributes(self):
        model = terms.ModelSpec((terms.nodematch("zone"),))
        assert any("attributes" in d for d in terms.validate_model(model, 5))
        with pytest.raises(ModelValidationError):
            terms.evaluate_statistics(model, Graph(5))


class TestGrammar:
    def test_full_grammar_round_trip(self):
        text = "edges,twopath,gwesp:0.75,gwnsp:0.75,gwd:0.75,nodematch:lobe,kcycle:4,kdegree:1"
        model = terms.parse_terms(text)
        assert model.to_string() == text

    def test_default_tau_applies(self):
        model = terms.parse_terms("gwesp", default_tau=0.6)
        assert model.terms[0].tau == 0.6

    def test_unknown_term_rejected(self):
        with pytest.raises(DataError):
            terms.parse_terms("edges,wat")

    def test_presets(self):
        assert terms.best_assessment().to_string() == "edges,gwesp:0.75,gwnsp:0.75"
        full = terms.full_candidate(attribute="lobe")
        assert full.to_string() == (
            "edges,twopath,gwesp:0.75,gwdsp:0.75,gwnsp:0.75,gwd:0.75,nodematch:lobe"
        )
