import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vmric import CandidateModel, ConfigError, PenaltySpec, Records, VmricError, evaluate_candidates, selection_frequencies
from vmric.criteria import CriterionValue
from vmric.selection import CandidateScore, SelectionReport, assemble_report

SPEC = PenaltySpec(0.85)


def records(seed=0, n=200, w=2):
    rng = np.random.default_rng(seed)
    good = rng.standard_normal(n)
    y = rng.standard_normal((n, w))
    y[2:] += np.outer(good[:-2], np.linspace(1.0, 2.0, w))
    return Records(series={"good": good, "noise": rng.standard_normal(n)}, y=y)


def test_single_candidate():
    r = evaluate_candidates(records(), [CandidateModel(1, "good")], 2, SPEC)
    assert (r.chosen_vmric, r.chosen_aic, r.chosen_bic) == (1, 1, 1)
    assert r.m1_hat == r.m2_hat == {1}


def test_exact_tie_goes_to_lowest_id():
    data = records()
    r = evaluate_candidates(data, [CandidateModel(2, "good"), CandidateModel(1, "good")], 2, SPEC)
    assert r.score(1).criterion == r.score(2).criterion
    assert (r.chosen_vmric, r.chosen_aic, r.chosen_bic) == (1, 1, 1)
    assert r.m1_hat == r.m2_hat == {1, 2}


def test_informative_predictor_wins():
    r = evaluate_candidates(records(n=2000), [CandidateModel(1, "noise"), CandidateModel(2, "good")], 2, SPEC)
    assert r.chosen_vmric == 2 and r.chosen_aic == 2
    assert r.m1_hat == {2}


def test_report_is_order_independent():
    data = records()
    cands = [CandidateModel(1, "good"), CandidateModel(2, "noise"), CandidateModel(3, "good", lag=1)]
    a = evaluate_candidates(data, cands, 2, SPEC)
    b = evaluate_candidates(data, cands[::-1], 2, SPEC)
    assert a.to_dict() == b.to_dict()


def test_failing_candidate_is_recorded():
    data = records()
    data = Records(series={**data.series, "dead": np.zeros(data.n)}, y=data.y)
    r = evaluate_candidates(data, [CandidateModel(1, "dead"), CandidateModel(2, "good")], 2, SPEC)
    assert r.chosen_vmric == 2
    assert [s.id for s in r.per_model] == [2]
    assert r.failures[1].startswith("numerical-failure")


def test_all_fail():
    data = Records(series={"dead": np.zeros(20)}, y=np.ones((20, 2)))
    with pytest.raises(VmricError):
        evaluate_candidates(data, [CandidateModel(1, "dead")], 2, SPEC)


def test_bad_candidate_lists():
    with pytest.raises(ConfigError):
        evaluate_candidates(records(), [], 2, SPEC)
    with pytest.raises(ConfigError):
        evaluate_candidates(records(), [CandidateModel(1, "good"), CandidateModel(1, "noise")], 2, SPEC)
    with pytest.raises(ConfigError):
        CandidateModel.from_dict({"id": 1, "series": "w", "colour": "red"})


def _score(i, mi, vi, pw=0.5):
    return CandidateScore(i, CriterionValue(mi, vi, pw, mi + pw * vi), 0.0, 0.0)


def test_diagnostic_sets():
    r = assemble_report([_score(1, 2.0, 5.0), _score(2, 2.0, 3.0), _score(3, 2.5, 0.1)])
    assert r.m1_hat == {1, 2}
    assert r.m2_hat == {2}
    assert r.chosen_vmric == 3  # the summed total, not the nested sets, decides


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.floats(0, 10), st.floats(0, 10)), min_size=1, max_size=6))
def test_set_nesting(values):
    r = assemble_report([_score(i + 1, mi, vi) for i, (mi, vi) in enumerate(values)])
    assert r.m2_hat <= r.m1_hat <= {s.id for s in r.per_model}
    assert r.score(r.chosen_vmric).criterion.total == min(s.criterion.total for s in r.per_model)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.1, 5), st.floats(0.1, 5), st.floats(0, 3), st.floats(0, 3))
def test_dominant_candidate_wins(mi, vi, dmi, dvi):
    best = _score(2, mi, vi)
    other = _score(1, mi + dmi + 1e-3, vi + dvi + 1e-3)
    assert assemble_report([other, best]).chosen_vmric == 2


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.01, 100.0))
def test_argmin_invariant_to_response_scale(seed, c):
    data = records(seed, n=80)
    scaled = Records(series=data.series, y=c * data.y)
    cands = [CandidateModel(1, "good"), CandidateModel(2, "noise")]
    a = evaluate_candidates(data, cands, 2, SPEC)
    b = evaluate_candidates(scaled, cands, 2, SPEC)
    for s in a.per_model:
        t = b.score(s.id).criterion
        assert t.mi_norm == pytest.approx(c**2 * s.criterion.mi_norm, rel=1e-9)
        assert t.vi_norm == pytest.approx(c**2 * s.criterion.vi_norm, rel=1e-9)
    assert a.chosen_vmric == b.chosen_vmric


def _report(v, a, b):
    return SelectionReport([], v, a, b, frozenset(), frozenset())


def test_selection_frequencies():
    assert selection_frequencies([_report(1, 1, 1)] * 3, 1) == {"vmric": 1.0, "aic": 1.0, "bic": 1.0}
    assert selection_frequencies([_report(2, 2, 2)] * 3, 1) == {"vmric": 0.0, "aic": 0.0, "bic": 0.0}
    f = selection_frequencies([_report(1, 2, 1), _report(1, 1, 2), _report(2, 2, 2), _report(1, 2, 2)], 1)
    assert f == {"vmric": 0.75, "aic": 0.25, "bic": 0.25}
    with pytest.raises(ConfigError):
        selection_frequencies([], 1)


def test_report_json():
    r = evaluate_candidates(records(), [CandidateModel(1, "good"), CandidateModel(2, "noise")], 2, SPEC)
    d = json.loads(json.dumps(r.to_dict()))
    assert d["chosen"]["vmric"] == r.chosen_vmric
    assert {"id", "mi_norm", "vi_norm", "penalty_weight", "total", "aic", "bic"} <= set(d["per_model"][0])
    assert d["m2_hat"] == sorted(r.m2_hat)
