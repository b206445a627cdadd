import json

import numpy as np
import pytest

from ergmkit import results, terms
from ergmkit.errors import SchemaError
from ergmkit.estimation import EstimationControl, mple
from ergmkit.gof import gof_run
from ergmkit.netmetrics import descriptive_metrics
from ergmkit.sampler import SamplerControl, bernoulli_graph
from ergmkit.selection import CandidateSet, backward_pvalue_select, group_compare

from test_selection import FAST, GROUP_SUMMARY_A, GROUP_SUMMARY_B


@pytest.fixture
def fit():
    g = bernoulli_graph(20, 0.3, seed=1)
    f = mple(terms.ModelSpec((terms.edges(), terms.gwesp(0.75))), g)
    f.seed = 99
    return f


class TestFitRoundTrip:
    def test_object_round_trip_equality(self, fit, tmp_path):
        path = tmp_path / "fit.json"
        results.write_result(fit, path)
        back = results.fit_from_doc(results.read_result(path))
        assert back == fit

    def test_doc_round_trip_bytes(self, fit, tmp_path):
        doc = results.fit_to_doc(fit)
        p1 = tmp_path / "a.json"
        p2 = tmp_path / "b.json"
        results.write_result(doc, p1)
        results.write_result(results.read_result(p1), p2)
        assert p1.read_bytes() == p2.read_bytes()


class TestGofRoundTrip:
    def test_report_round_trip_equality(self, fit, tmp_path):
        g = bernoulli_graph(20, 0.3, seed=1)
        report = gof_run(
            fit, g,
            control=SamplerControl(burn_in=500, interval=50, sample_count=8, seed=2),
        )
        path = tmp_path / "gof.json"
        results.write_result(report, path)
        back = results.gof_from_doc(results.read_result(path))
        assert back == report


class TestOtherKinds:
    def test_metric_report_round_trip(self, tmp_path):
        report = descriptive_metrics(bernoulli_graph(12, 0.4, seed=3))
        path = tmp_path / "m.json"
        results.write_result(report, path, seed=1)
        back = results.metrics_from_doc(results.read_result(path))
        assert back == report

    def test_group_comparison_round_trip(self, tmp_path):
        cmp = group_compare(GROUP_SUMMARY_A, GROUP_SUMMARY_B)
        path = tmp_path / "c.json"
        results.write_result(cmp, path, seed=5)
        back = results.comparison_from_doc(results.read_result(path))
        assert back == cmp

    def test_selection_trace_round_trip(self, tmp_path):
        g = bernoulli_graph(25, 0.15, seed=11)
        cand = CandidateSet(
            terms=terms.ModelSpec((terms.edges(), terms.twopath())), alpha=0.05
        )
        trace = backward_pvalue_select(cand, g, control=FAST)
        path = tmp_path / "t.json"
        results.write_result(trace, path)
        back = results.trace_from_doc(results.read_result(path))
        assert back.final_fit == trace.final_fit
        assert [s.decision for s in back.steps] == [s.decision for s in trace.steps]
        # serialized forms are byte-identical
        assert results.dumps(results.trace_to_doc(back)) == path.read_text()


class TestSchemaValidation:
    def test_unknown_version_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"schema_version": 99, "kind": "fit_result"}))
        with pytest.raises(SchemaError, match="version"):
            results.read_result(path)

    def test_unknown_kind_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"schema_version": 1, "kind": "mystery"}))
        with pytest.raises(SchemaError, match="kind"):
            results.read_result(path)

    def test_non_json_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("not json at all")
        with pytest.raises(SchemaError, match="JSON"):
            results.read_result(path)

    def test_unserializable_object_rejected(self, tmp_path):
        with pytest.raises(SchemaError):
            results.write_result(object(), tmp_path / "x.json")
