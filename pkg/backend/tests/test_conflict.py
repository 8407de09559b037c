import pytest

from conflict import (
    ConflictReport,
    binary_conflict_free,
    conflict_free,
    conflict_iff_shared_preplace,
    first_witness_word,
    is_conflict,
    is_structural_conflict_net,
    step_bound,
)
from multiset import Multiset
from net_io import parse_net
from net_model import reach, step
from reachability import ExplorationBudget

PUMP = "place s tokens 1\nplace q\ntrans t in s out s q\n"


# Single conflicts
def test_three_way_conflict_at_initial_marking(net_fig1):
    """Two p1 tokens cannot serve a, b and c at once"""
    m0 = net_fig1.initial_marking
    assert is_conflict(net_fig1, m0, step("a", "b", "c"))
    assert not is_conflict(net_fig1, m0, step("a", "b"))


def test_autoconcurrency_is_never_a_conflict(net_fig1, net_w2):
    assert not is_conflict(net_fig1, net_fig1.initial_marking, step("a", "a"))
    assert not is_conflict(net_w2, net_w2.initial_marking, step("t", "t"))


def test_binary_conflict_after_a(net_fig1):
    m = reach(net_fig1, "a")
    assert is_conflict(net_fig1, m, step("b", "c"))
    assert not is_conflict(net_fig1, m, step("b", "d"))


def test_disabled_member_is_no_conflict(net_fig1):
    assert not is_conflict(net_fig1, net_fig1.initial_marking, step("a", "d"))


def test_empty_step_rejected(net_fig1):
    with pytest.raises(ValueError):
        is_conflict(net_fig1, net_fig1.initial_marking, Multiset())


def test_step_bound(net_fig1, net_w2, net_self):
    assert step_bound(net_fig1, net_fig1.initial_marking, "a") == 1
    assert step_bound(net_fig1, net_fig1.initial_marking, "d") == 0
    assert step_bound(net_w2, net_w2.initial_marking, "t") == 1
    assert step_bound(net_self, net_self.initial_marking, "t") == 2


# Net-wide checks
def test_fig1_is_not_binary_conflict_free(net_fig1):
    report = binary_conflict_free(net_fig1, stop_at_first=True)
    assert report.verdict == "fails"
    assert not report.holds
    witness = report.witnesses[0]
    assert witness.step == {"b": 1, "c": 1}
    assert witness.word == ["a"]
    assert first_witness_word(report) == ("a",)


def test_fig1_full_report(net_fig1):
    report = binary_conflict_free(net_fig1)
    assert report.markings_explored == 14
    assert report.exhaustive
    assert all(Multiset(w.step).cardinality == 2 for w in report.witnesses)
    # one conflict after each of a, b and c fired alone
    assert sorted(w.word[0] for w in report.witnesses) == ["a", "b", "c"]


def test_fig1_conflict_free_finds_ternary_conflict(net_fig1):
    report = conflict_free(net_fig1)
    assert report.verdict == "fails"
    assert report.witnesses[0].step == {"a": 1, "b": 1, "c": 1}
    assert report.witnesses[0].word == []


@pytest.mark.parametrize("fixture", ["net_fig2", "net_triv", "net_w2", "net_self"])
def test_conflict_free_fixtures(fixture, request):
    net = request.getfixturevalue(fixture)
    assert binary_conflict_free(net).verdict == "holds"
    assert conflict_free(net).verdict == "holds"
    assert first_witness_word(binary_conflict_free(net)) is None


def test_structural_conflict_nets(net_fig1, net_fig2, net_triv, net_w2, net_self):
    assert is_structural_conflict_net(net_fig1).verdict == "fails"
    assert is_structural_conflict_net(net_fig2).verdict == "holds"
    assert is_structural_conflict_net(net_triv).verdict == "holds"
    assert is_structural_conflict_net(net_w2).verdict == "holds"
    report = is_structural_conflict_net(net_self)
    assert report.verdict == "fails"
    assert report.witnesses[0].step == {"t": 2}


def test_shared_preplace_characterisation(net_fig1, net_fig2):
    assert conflict_iff_shared_preplace(net_fig2) == []
    counterexamples = conflict_iff_shared_preplace(net_fig1)
    assert counterexamples
    assert counterexamples[0].word == []


def test_multiplicity_cap_gives_bounded_verdict(net_self):
    report = conflict_free(net_self, mult_cap=1)
    assert report.verdict == "bounded-holds"
    assert report.holds
    assert any("capped" in note for note in report.notes)


def test_truncated_exploration_is_bounded():
    pump = parse_net(PUMP)
    report = binary_conflict_free(pump, ExplorationBudget(max_markings=5))
    assert report.verdict == "bounded-holds"
    assert not report.exhaustive
    assert report.markings_explored == 5


def test_report_serializes(net_fig1):
    report = binary_conflict_free(net_fig1, stop_at_first=True)
    again = ConflictReport.model_validate_json(report.model_dump_json())
    assert again.witnesses == report.witnesses
