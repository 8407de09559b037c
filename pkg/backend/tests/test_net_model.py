import pytest

from multiset import Multiset
from net_errors import NotEnabledError, NotFiringSequenceError, UnknownNodeError
from net_model import (
    Net,
    NotFirable,
    TransitionSpec,
    enabled,
    enabled_step,
    enabled_transitions,
    fire,
    fire_step,
    fire_word,
    firing_sequence,
    is_firing_sequence,
    postset,
    preset,
    reach,
    step,
    validate,
)


# Validation
def test_fixture_nets_are_valid(named_nets):
    """Every shipped fixture satisfies the net conditions"""
    for net in named_nets:
        assert validate(net) == []


def test_empty_preset_is_reported():
    net = Net(places={"q": 0}, transitions={"t": TransitionSpec(outputs={"q": 1})})
    assert validate(net) == ["empty preset: transition t"]


def test_overlapping_identifiers_reported():
    net = Net(places={"x": 1}, transitions={"x": TransitionSpec(inputs={"x": 1})})
    assert any(v.startswith("not disjoint") for v in validate(net))


def test_unknown_place_in_arcs():
    net = Net(places={"s": 1}, transitions={"t": TransitionSpec(inputs={"s": 1}, outputs={"ghost": 1})})
    assert validate(net) == ["unknown place ghost in arcs of transition t"]


def test_net_is_frozen(net_triv):
    with pytest.raises(Exception):
        net_triv.name = "other"


def test_negative_tokens_rejected_by_model():
    with pytest.raises(Exception):
        Net(places={"s": -1})


# Pre- and postsets
def test_pre_and_post_of_transitions(net_fig1):
    assert net_fig1.pre("d") == Multiset({"p5": 1, "p6": 1})
    assert net_fig1.post("d") == Multiset({"p1": 1})
    assert preset(net_fig1, "a") == Multiset({"p1": 1, "p2": 1})


def test_place_presets_list_producers(net_fig1):
    assert preset(net_fig1, "p6") == Multiset({"a": 1, "b": 1, "c": 1})
    assert postset(net_fig1, "p1") == Multiset({"a": 1, "b": 1, "c": 1})


def test_preset_of_step_is_weighted_sum(net_fig1):
    assert preset(net_fig1, step("a", "b")) == Multiset({"p1": 2, "p2": 1, "p3": 1})
    assert preset(net_fig1, Multiset({"a": 2})) == Multiset({"p1": 2, "p2": 2})


def test_unknown_node(net_fig1):
    with pytest.raises(UnknownNodeError):
        preset(net_fig1, "nope")
    with pytest.raises(UnknownNodeError):
        net_fig1.pre("p1")


# Token game
def test_step_enabling_at_initial_marking(net_fig1):
    m0 = net_fig1.initial_marking
    assert enabled_step(net_fig1, m0, step("a", "b"))
    assert not enabled_step(net_fig1, m0, step("a", "b", "c"))
    assert not enabled_step(net_fig1, m0, step("d"))


def test_fire_step_matches_sequential_firing(net_fig1):
    m0 = net_fig1.initial_marking
    concurrent = fire_step(net_fig1, m0, step("a", "b"))
    assert concurrent == fire(net_fig1, fire(net_fig1, m0, "a"), "b")
    assert concurrent == Multiset({"p4": 1, "p5": 1, "p6": 2})


def test_fire_disabled_raises(net_fig1):
    with pytest.raises(NotEnabledError):
        fire(net_fig1, net_fig1.initial_marking, "d")
    with pytest.raises(NotEnabledError):
        fire_step(net_fig1, net_fig1.initial_marking, step("a", "a"))


def test_empty_step_rejected(net_fig1):
    with pytest.raises(ValueError):
        enabled_step(net_fig1, net_fig1.initial_marking, Multiset())


def test_enabled_transitions(net_fig1):
    assert enabled_transitions(net_fig1, net_fig1.initial_marking) == ["a", "b", "c"]
    assert enabled(net_fig1, reach(net_fig1, "a"), "d")


def test_weight_two_arc(net_w2):
    m0 = net_w2.initial_marking
    assert enabled(net_w2, m0, "t")
    assert fire(net_w2, m0, "t") == Multiset()
    assert not enabled_step(net_w2, m0, step("t", "t"))


# Words
def test_fire_word_reports_failing_position(net_fig1):
    assert fire_word(net_fig1, net_fig1.initial_marking, "abd") == Multiset({"p1": 1, "p4": 1, "p6": 1})
    assert fire_word(net_fig1, net_fig1.initial_marking, "abc") == NotFirable(2)
    assert fire_word(net_fig1, net_fig1.initial_marking, "") == net_fig1.initial_marking


def test_fire_word_unknown_transition(net_fig1):
    with pytest.raises(UnknownNodeError):
        fire_word(net_fig1, net_fig1.initial_marking, ["zz"])


def test_reach_raises_with_index(net_fig1):
    with pytest.raises(NotFiringSequenceError) as exc:
        reach(net_fig1, "da")
    assert exc.value.index == 0
    assert exc.value.details["word"] == ["d", "a"]


def test_firing_sequence_helpers(net_fig2):
    assert is_firing_sequence(net_fig2, "abab")
    assert firing_sequence(net_fig2, ["a", "b"]) == ("a", "b")
    assert reach(net_fig2, "aaabbb") == net_fig2.initial_marking


def test_isolated_place_is_allowed():
    """A place without arcs is legal, never blocks firing and still seeds the initial cut"""
    from net_io import parse_net
    from process_model import empty_process

    net = parse_net("place s tokens 1\nplace lone tokens 2\ntrans t in s\n")
    assert validate(net) == []
    assert fire_word(net, net.initial_marking, ["t"]) == Multiset({"lone": 2})
    assert sorted(empty_process(net).places.values()) == ["lone", "lone", "s"]
