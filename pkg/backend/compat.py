# Compatibility of firing sequences with processes, linearizations and FIFO process construction
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple
import logging

import networkx as nx

from multiset import Multiset
from net_errors import NotFiringSequenceError, PreconditionError, ProcNetError
from net_model import Net, NotFirable, Word, fire_word, reach
from process_model import (
    GRProcess,
    empty_process,
    extend_process,
    fifo_choice,
    is_prefix,
    label_multiset,
    prefix_from_transitions,
    structure,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PosWitness:
    """Bijection from the process transitions onto word positions, monotone in causality"""

    pos: Dict[int, int]

    @cached_property
    def by_position(self) -> Dict[int, int]:
        return {i: t for t, i in self.pos.items()}

    def at(self, index: int) -> int:
        return self.by_position[index]

    def transitions_before(self, n: int) -> List[int]:
        """Transitions mapped to the first n positions, in word order"""
        return [self.by_position[i] for i in range(min(n, len(self.by_position)))]


def compatible(p: GRProcess, word: Sequence[str]) -> Optional[PosWitness]:
    """Search a position map proving `word` compatible with p, or None"""
    word = tuple(word)
    if len(word) != len(p.transitions) or Multiset(word) != label_multiset(p):
        return None
    dag = structure(p).transition_dag
    preds = {t: set(dag.predecessors(t)) for t in dag.nodes}
    assigned: Dict[int, int] = {}

    def search(i: int) -> bool:
        if i == len(word):
            return True
        for t in p.occurrences(word[i]):
            if t in assigned or not preds[t] <= assigned.keys():
                continue
            assigned[t] = i
            if search(i + 1):
                return True
            del assigned[t]
        return False

    if search(0):
        return PosWitness(pos=dict(assigned))
    return None


def _linear_order(p: GRProcess, key=None) -> List[int]:
    dag = structure(p).transition_dag
    return list(nx.lexicographical_topological_sort(dag, key=key))


def _labels(p: GRProcess, order: Sequence[int]) -> Word:
    return tuple(p.transitions[t] for t in order)


def _assert_firing(net: Net, word: Word) -> Word:
    outcome = fire_word(net, net.initial_marking, word)
    if isinstance(outcome, NotFirable):
        # every linear extension of a process of net fires; reaching this means p is not one
        raise ProcNetError(f"linearization {' '.join(word)} is not a firing sequence",
                           error_code="LINEARIZATION_NOT_FIRABLE")
    return word


def linearizations(p: GRProcess, net: Net) -> List[Word]:
    """Lin(p): label words of all linear extensions of the causal order, sorted"""
    dag = structure(p).transition_dag
    if dag.number_of_nodes() == 0:
        return [()]
    words = {_labels(p, order) for order in nx.all_topological_sorts(dag)}
    return [_assert_firing(net, w) for w in sorted(words)]


def some_linearization(p: GRProcess, net: Net) -> Word:
    """The linearization taking transitions in creation order wherever causality allows"""
    return _assert_firing(net, _labels(p, _linear_order(p)))


def process_of(net: Net, word: Sequence[str]) -> GRProcess:
    """Build a process compatible with a firing sequence, consuming tokens FIFO by creation index"""
    word = tuple(word)
    p = empty_process(net)
    for i, t in enumerate(word):
        chosen = fifo_choice(p, net, t)
        if chosen is None:
            raise NotFiringSequenceError(word, i)
        p = extend_process(p, net, t, chosen)
    return p


def _require_firing(net: Net, word: Word) -> None:
    reach(net, word)


def _require_lin(p: GRProcess, net: Net, word: Word) -> PosWitness:
    _require_firing(net, word)
    witness = compatible(p, word)
    if witness is None:
        raise PreconditionError(f"{' '.join(word) or 'ε'} is not a linearization of the process",
                                error_code="NOT_A_LINEARIZATION")
    return witness


def _is_word_prefix(short: Word, long: Word) -> bool:
    return len(short) <= len(long) and long[: len(short)] == short


def extend_process_along(p_small: GRProcess, sigma_small: Sequence[str], sigma_big: Sequence[str],
                         net: Net) -> GRProcess:
    """Grow p_small by the suffix of sigma_big, so that sigma_big ∈ Lin(result) and p_small ≤ result"""
    sigma_small, sigma_big = tuple(sigma_small), tuple(sigma_big)
    _require_lin(p_small, net, sigma_small)
    _require_firing(net, sigma_big)
    if not _is_word_prefix(sigma_small, sigma_big):
        raise PreconditionError("the smaller word is not a prefix of the larger one", error_code="NOT_A_PREFIX")
    p = p_small
    for i in range(len(sigma_small), len(sigma_big)):
        t = sigma_big[i]
        chosen = fifo_choice(p, net, t)
        if chosen is None:
            raise NotFiringSequenceError(sigma_big, i)
        p = extend_process(p, net, t, chosen)
    return p


def process_prefix_for(p: GRProcess, sigma: Sequence[str], sigma_prefix: Sequence[str], net: Net) -> GRProcess:
    """The prefix of p spanned by the transitions at the first |sigma_prefix| positions of sigma"""
    sigma, sigma_prefix = tuple(sigma), tuple(sigma_prefix)
    witness = _require_lin(p, net, sigma)
    if not _is_word_prefix(sigma_prefix, sigma):
        raise PreconditionError("sigma_prefix is not a prefix of sigma", error_code="NOT_A_PREFIX")
    ts = witness.transitions_before(len(sigma_prefix))
    return prefix_from_transitions(p, ts)


def linearize_extension(p_small: GRProcess, p_big: GRProcess, sigma_small: Sequence[str], net: Net) -> Word:
    """A linearization of p_big starting with the given linearization of its prefix p_small"""
    sigma_small = tuple(sigma_small)
    if not is_prefix(p_small, p_big):
        raise PreconditionError("the first process is not a prefix of the second", error_code="NOT_A_PREFIX")
    _require_lin(p_small, net, sigma_small)
    dag = structure(p_big).transition_dag
    rest = dag.subgraph([t for t in p_big.transitions if t not in p_small.transitions])
    suffix = tuple(p_big.transitions[t] for t in nx.lexicographical_topological_sort(rest))
    return _assert_firing(net, sigma_small + suffix)


def match_prefix_down(p_small: GRProcess, p_big: GRProcess, sigma: Sequence[str],
                      net: Net) -> Tuple[Word, Word, Word]:
    """For σ ∈ Lin(p_big) and p_small ≤ p_big return (σ'', σ1, σ2) with σ'' ∈ Lin(p_small),
    σ'' ≤ σ1, σ2 ≤ σ and σ1 ≡₀* σ2.
    """
    sigma = tuple(sigma)
    if not is_prefix(p_small, p_big):
        raise PreconditionError("the first process is not a prefix of the second", error_code="NOT_A_PREFIX")
    witness = _require_lin(p_big, net, sigma)
    small_ts = sorted(p_small.transitions, key=lambda t: witness.pos[t])
    sigma_pp = tuple(p_small.transitions[t] for t in small_ts)
    if not small_ts:
        return (), (), ()
    last = max(witness.pos[t] for t in small_ts)
    sigma2 = sigma[: last + 1]
    p2 = prefix_from_transitions(p_big, witness.transitions_before(last + 1))
    sigma1 = linearize_extension(p_small, p2, sigma_pp, net)
    logger.debug("match_prefix_down: σ''=%s σ1=%s σ2=%s", sigma_pp, sigma1, sigma2)
    return sigma_pp, sigma1, sigma2
