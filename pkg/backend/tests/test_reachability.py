import pytest

from multiset import Multiset
from reachability import (
    ExplorationBudget,
    enumerate_firing_sequences,
    enumerate_firing_sequences_report,
    is_reachable,
    reachable_markings,
)


def test_fig1_has_fourteen_reachable_markings(net_fig1):
    """Markings are fixed by which of a, b, c fired and whether d fired"""
    result = reachable_markings(net_fig1)
    assert len(result) == 14
    assert result.exhaustive
    assert Multiset({"p4": 1, "p5": 1, "p6": 2}) in result


def test_words_reach_their_markings(net_fig1):
    from net_model import reach

    result = reachable_markings(net_fig1)
    for m in result.markings:
        assert reach(net_fig1, result.words[m]) == m
    assert result.words[net_fig1.initial_marking] == ()


def test_budget_truncates_unbounded_net():
    from net_io import parse_net

    pump = parse_net("place s tokens 1\nplace q\ntrans t in s out s q\n")
    result = reachable_markings(pump, ExplorationBudget(max_markings=5, max_depth=100))
    assert len(result) == 5
    assert not result.exhaustive


def test_depth_budget_truncates():
    from net_io import parse_net

    pump = parse_net("place s tokens 1\nplace q\ntrans t in s out s q\n")
    result = reachable_markings(pump, ExplorationBudget(max_markings=100, max_depth=3))
    assert len(result) == 4
    assert result.exhausted


def test_invalid_budget():
    with pytest.raises(ValueError):
        ExplorationBudget(max_markings=0)


def test_is_reachable(net_fig1):
    assert is_reachable(net_fig1, Multiset({"p1": 1, "p4": 1, "p6": 1}))
    assert not is_reachable(net_fig1, Multiset({"p1": 3}))


def test_fig1_firing_sequences_are_finite(net_fig1):
    """Every transition fires at most once, so FS is finite with words up to length 4"""
    report = enumerate_firing_sequences_report(net_fig1, 6)
    assert not report.truncated
    assert len(report.words) == 37
    assert max(len(w) for w in report.words) == 4
    assert ("a", "b", "d", "c") in report.words


def test_enumeration_order_and_prefix_closure(net_fig1):
    words = enumerate_firing_sequences(net_fig1, 2)
    assert words[:4] == [(), ("a",), ("b",), ("c",)]
    assert all(w[:-1] in words for w in words if w)
    assert [len(w) for w in words] == sorted(len(w) for w in words)


def test_truncation_flag(net_fig2):
    report = enumerate_firing_sequences_report(net_fig2, 2)
    assert report.truncated
    assert len(report.words) == 1 + 2 + 4


def test_zero_length(net_triv):
    assert enumerate_firing_sequences(net_triv, 0) == [()]
    with pytest.raises(ValueError):
        enumerate_firing_sequences(net_triv, -1)
