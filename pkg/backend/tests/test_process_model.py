import networkx as nx
import pytest

from multiset import Multiset
from net_errors import PreconditionError, ProcessValidationError, UnknownNodeError
from process_model import (
    GRProcess,
    ProcessIndex,
    canonical_key,
    causal_past,
    causal_prefixes,
    check_process,
    empty_process,
    end_marking,
    end_places,
    enumerate_processes,
    extend_process,
    fifo_choice,
    find_isomorphism,
    is_maximal,
    is_prefix,
    isomorphic,
    label_multiset,
    prefix_from_transitions,
    process_graph,
    structure,
    token_choices,
    validate_process,
)


def shifted(p: GRProcess, offset: int) -> GRProcess:
    """Same process with every id moved by offset"""
    return GRProcess(
        places={x + offset: s for x, s in p.places.items()},
        transitions={x + offset: t for x, t in p.transitions.items()},
        arcs=frozenset((x + offset, y + offset) for x, y in p.arcs),
        initial_cut=frozenset(x + offset for x in p.initial_cut),
    )


# Fixtures from the worked example
def test_process_of_matches_fixture_files(p1, p2, p1_from_file, p2_from_file):
    assert p1 == p1_from_file
    assert p2 == p2_from_file


def test_p1_shape(p1):
    assert p1.transitions == {6: "a", 8: "b", 10: "d", 12: "c"}
    assert len(p1.places) == 10
    assert len(p1.arcs) == 12
    assert p1.initial_cut == frozenset(range(6))


def test_p1_is_valid_and_maximal(net_fig1, p1, p2):
    assert validate_process(p1, net_fig1) == []
    assert is_maximal(p1, net_fig1)
    assert is_maximal(p2, net_fig1)
    assert end_marking(p1) == Multiset({"p6": 2})
    assert end_places(p1) == frozenset({9, 13})


def test_p1_and_p2_are_not_isomorphic(p1, p2):
    assert not isomorphic(p1, p2)
    assert label_multiset(p1) == label_multiset(p2) == Multiset("abcd")


def test_empty_process(net_fig1):
    p = empty_process(net_fig1)
    assert p.places == {0: "p1", 1: "p1", 2: "p2", 3: "p3", 4: "p4", 5: "p5"}
    assert p.transitions == {}
    assert end_marking(p) == net_fig1.initial_marking
    assert not is_maximal(p, net_fig1)


# Validation
def test_missing_arc_breaks_preset_preservation(net_fig1, p1):
    broken = GRProcess(places=p1.places, transitions=p1.transitions,
                       arcs=p1.arcs - {(4, 12)}, initial_cut=p1.initial_cut)
    violations = validate_process(broken, net_fig1)
    assert violations == ["π does not preserve the preset of transition 12 (c)"]


def test_branching_place_rejected(net_fig1, p1):
    broken = GRProcess(places=p1.places, transitions=p1.transitions,
                       arcs=p1.arcs | {(0, 8)}, initial_cut=p1.initial_cut)
    assert "place 0 has more than one output transition" in validate_process(broken, net_fig1)


def test_wrong_labels_rejected(net_fig1, p1):
    relabelled = GRProcess(places={**p1.places, 13: "p5"}, transitions=p1.transitions,
                           arcs=p1.arcs, initial_cut=p1.initial_cut)
    with pytest.raises(ProcessValidationError):
        check_process(relabelled, net_fig1)


def test_unknown_endpoint(net_triv):
    p = GRProcess(places={0: "s"}, transitions={}, arcs=frozenset({(0, 9)}), initial_cut=frozenset({0}))
    assert validate_process(p, net_triv) == ["arc (0, 9) has an unknown endpoint"]


def test_label_lookup(p1):
    assert p1.label(11) == "p1"
    assert p1.label(10) == "d"
    with pytest.raises(UnknownNodeError):
        p1.label(99)


def test_json_round_trip(p1):
    assert GRProcess.from_json(p1.to_json()) == p1
    with pytest.raises(ValueError):
        GRProcess.from_json("{not json")


# Causality and prefixes
def test_causal_past(p1):
    assert causal_past(p1, 12) == frozenset({6, 10})
    assert causal_past(p1, 8) == frozenset()
    assert causal_past(p1, 13) == frozenset({6, 10, 12})


def test_comparability(p1):
    view = structure(p1)
    assert not view.comparable(1, 11)
    assert view.comparable(0, 13)
    assert process_graph(p1).number_of_nodes() == 14


def test_prefix_from_transitions(p1):
    q = prefix_from_transitions(p1, [6, 8])
    assert q.transitions == {6: "a", 8: "b"}
    assert set(q.places) == set(range(6)) | {7, 9}
    assert is_prefix(q, p1)
    with pytest.raises(PreconditionError):
        prefix_from_transitions(p1, [10])


def test_causal_prefixes_of_p1(p1):
    """a → d → c is a chain, b is concurrent with all of it"""
    prefixes = causal_prefixes(p1)
    assert len(prefixes) == 8
    assert prefixes[0].transitions == {}
    assert prefixes[-1] == p1
    assert all(is_prefix(q, p1) for q in prefixes)


def test_is_prefix_rejects_other_process(p1, p2):
    assert not is_prefix(p1, p2)


def test_is_prefix_requires_a_process(net_fig1, p1):
    """Keeping a produced place without the transition producing it is not a prefix"""
    orphan = GRProcess(places={s: p1.places[s] for s in [0, 1, 2, 3, 4, 5, 7]},
                       initial_cut=p1.initial_cut)
    assert validate_process(orphan, net_fig1) != []
    assert not is_prefix(orphan, p1)
    truncated_cut = GRProcess(places={s: p1.places[s] for s in range(5)}, initial_cut=p1.initial_cut)
    assert not is_prefix(truncated_cut, p1)


# Isomorphism
def test_isomorphism_of_shifted_copy(p1):
    moved = shifted(p1, 100)
    phi = find_isomorphism(p1, moved)
    assert phi is not None
    assert phi[12] == 112
    assert canonical_key(p1) == canonical_key(moved)


def test_process_index_deduplicates(p1, p2):
    index = ProcessIndex()
    assert index.add(p1)
    assert not index.add(shifted(p1, 50))
    assert index.add(p2)
    assert len(index) == 2
    assert index.find(shifted(p2, 7)) is p2


# Construction
def test_token_choices_and_fifo(net_fig1):
    p = empty_process(net_fig1)
    assert list(token_choices(p, net_fig1, "a")) == [[0, 2], [1, 2]]
    assert fifo_choice(p, net_fig1, "a") == [0, 2]
    assert fifo_choice(p, net_fig1, "d") is None


def test_extend_process(net_fig1):
    p = extend_process(empty_process(net_fig1), net_fig1, "b", [1, 3])
    assert p.transitions == {6: "b"}
    assert p.places[7] == "p6"
    with pytest.raises(PreconditionError):
        extend_process(p, net_fig1, "c", [1, 4])
    with pytest.raises(PreconditionError):
        extend_process(p, net_fig1, "c", [2, 4])


def test_enumerate_processes(net_fig1, net_fig2, net_triv):
    assert len(enumerate_processes(net_triv, 3)) == 2
    assert len(enumerate_processes(net_fig2, 2)) == 6
    # a may take either initial p1 token; both choices are isomorphic
    assert len(enumerate_processes(net_fig1, 1)) == 4
    with pytest.raises(ValueError):
        enumerate_processes(net_triv, -1)


def test_comparable_agrees_with_graph_reachability(p1, p2):
    for p in (p1, p2):
        view = structure(p)
        graph = process_graph(p)
        for x in graph:
            for y in graph:
                reachable = x == y or nx.has_path(graph, x, y) or nx.has_path(graph, y, x)
                assert view.comparable(x, y) == reachable
