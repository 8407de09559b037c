from collections import defaultdict
from itertools import combinations, combinations_with_replacement

import pytest

from compat import linearizations, process_of, some_linearization
from conflict import binary_conflict_free, conflict_free, is_structural_conflict_net
from diamond import check_cover, largest_fs_process
from process_model import enumerate_processes, label_multiset
from reachability import enumerate_firing_sequences
from seqequiv import fs_le, seq_class, seq_star_equiv
from swapping import bd_le, bd_le_direct, swap_star_equiv


def _nets(named_nets, small_corpus):
    return named_nets + small_corpus[:6]


def _same_labels(processes):
    groups = defaultdict(list)
    for p in processes:
        groups[label_multiset(p)].append(p)
    for group in groups.values():
        yield from combinations(group, 2)


# Processes and their linearizations
def test_every_linearization_gives_a_swap_equivalent_process(named_nets, small_corpus):
    for net in _nets(named_nets, small_corpus):
        for p in enumerate_processes(net, 2):
            for sigma in linearizations(p, net):
                assert swap_star_equiv(p, process_of(net, sigma)), (net.name, sigma)


def test_swap_equivalence_matches_sequence_equivalence(named_nets, small_corpus):
    """Two processes are swap equivalent exactly when their runs are reorderings of each other"""
    for net in _nets(named_nets, small_corpus):
        for p, q in _same_labels(enumerate_processes(net, 2)):
            sigma, rho = some_linearization(p, net), some_linearization(q, net)
            assert swap_star_equiv(p, q) == seq_star_equiv(net, sigma, rho), (net.name, sigma, rho)


def test_process_order_matches_sequence_order(named_nets):
    for net in named_nets:
        processes = enumerate_processes(net, 2)
        for p in processes:
            for q in processes:
                expected = fs_le(net, some_linearization(p, net), some_linearization(q, net))
                assert bd_le(p, q, net) == expected
                assert bd_le(p, q, net, direct=True) == expected


def test_swap_equivalence_matches_on_every_pair_of_runs(full_corpus):
    """Every linearization of one process against every linearization of the other, self pairs included"""
    for net in full_corpus:
        classes = {}
        groups = defaultdict(list)
        for p in enumerate_processes(net, 2):
            groups[label_multiset(p)].append((p, linearizations(p, net)))
        for group in groups.values():
            for (p, p_lins), (q, q_lins) in combinations_with_replacement(group, 2):
                expected = swap_star_equiv(p, q)
                for sigma in p_lins:
                    if sigma not in classes:
                        classes[sigma] = set(seq_class(net, sigma))
                    for rho in q_lins:
                        assert (rho in classes[sigma]) == expected, (net.name, sigma, rho)


def test_direct_process_order_matches_sequence_order_on_corpus(full_corpus):
    """Includes pairs where the left process is the longer one"""
    for net in full_corpus:
        processes = enumerate_processes(net, 2)
        lins = [some_linearization(p, net) for p in processes]
        for p, sigma in zip(processes, lins):
            for q, rho in zip(processes, lins):
                assert bd_le_direct(p, q, net) == fs_le(net, sigma, rho), (net.name, sigma, rho)


# Largest processes
@pytest.mark.parametrize("name", ["fig2", "triv", "w2"])
def test_largest_process_dominates_every_run(name, named_nets):
    net = next(n for n in named_nets if n.name == name)
    witness = largest_fs_process(net, 3)
    assert all(check_cover(net, witness, cover) for cover in witness.covers)
    for sigma in enumerate_firing_sequences(net, 3):
        assert fs_le(net, sigma, witness.rho), sigma


# Conflicts
def test_structural_conflict_nets_only_have_binary_conflicts(named_nets, small_corpus, budget):
    for net in _nets(named_nets, small_corpus):
        if is_structural_conflict_net(net, budget).verdict == "fails":
            continue
        binary = binary_conflict_free(net, budget)
        full = conflict_free(net, budget)
        assert (binary.verdict == "fails") == (full.verdict == "fails"), net.name


def test_conflict_free_implies_binary_conflict_free(named_nets, small_corpus, budget):
    for net in _nets(named_nets, small_corpus):
        if conflict_free(net, budget).verdict != "fails":
            assert binary_conflict_free(net, budget).verdict != "fails", net.name
