# Conflict analysis over bounded reachable markings
from itertools import combinations_with_replacement, product
from typing import Dict, Iterator, List, Literal, Optional
import logging
import os

from pydantic import BaseModel, Field

from multiset import Multiset
from net_model import Net, Word, enabled_step, step
from reachability import ExplorationBudget, ReachabilityResult, reachable_markings

logger = logging.getLogger(__name__)

CONFLICT_CONFIG = {
    'MULT_CAP': int(os.getenv('PROCNET_MULT_CAP', '4')),
}

Verdict = Literal["holds", "fails", "bounded-holds"]


class ConflictWitness(BaseModel):
    """A reachable marking, the offending step and a shortest word reaching the marking"""

    marking: Dict[str, int]
    step: Dict[str, int]
    word: List[str] = Field(default_factory=list)


class ConflictReport(BaseModel):
    property: str
    verdict: Verdict
    witnesses: List[ConflictWitness] = Field(default_factory=list)
    markings_explored: int = 0
    exhaustive: bool = True
    notes: List[str] = Field(default_factory=list)

    @property
    def holds(self) -> bool:
        return self.verdict != "fails"


def is_conflict(net: Net, m: Multiset, g: Multiset) -> bool:
    """G is a conflict at M: not enabled as a whole, yet every G↾{t} (with multiplicity) is"""
    if not g:
        raise ValueError("a conflict candidate must be a non-empty step")
    if enabled_step(net, m, g):
        return False
    return all(enabled_step(net, m, g.restrict([t])) for t in g)


def step_bound(net: Net, m: Multiset, t: str) -> int:
    """Largest k with k·•t ⊆ M"""
    pre = net.pre(t)
    return min(m[s] // w for s, w in pre.items())


def _witness(result: ReachabilityResult, m: Multiset, g: Multiset) -> ConflictWitness:
    return ConflictWitness(marking=m.to_dict(), step=g.to_dict(), word=list(result.words[m]))


def _verdict(witnesses: List[ConflictWitness], result: ReachabilityResult) -> Verdict:
    if witnesses:
        return "fails"
    return "holds" if result.exhaustive else "bounded-holds"


def _report(prop: str, witnesses: List[ConflictWitness], result: ReachabilityResult,
            notes: Optional[List[str]] = None) -> ConflictReport:
    report = ConflictReport(
        property=prop,
        verdict=_verdict(witnesses, result),
        witnesses=witnesses,
        markings_explored=len(result),
        exhaustive=result.exhaustive,
        notes=notes or [],
    )
    logger.info("%s on %d markings: %s (%d witnesses)", prop, report.markings_explored,
                report.verdict, len(witnesses))
    return report


def _pairs(net: Net) -> Iterator[Multiset]:
    for t, u in combinations_with_replacement(net.transition_ids, 2):
        yield step(t, u)


def binary_conflict_free(net: Net, budget: Optional[ExplorationBudget] = None,
                         stop_at_first: bool = False) -> ConflictReport:
    """No reachable marking has a two-element conflict, {t,t} included"""
    result = reachable_markings(net, budget)
    witnesses: List[ConflictWitness] = []
    for m in result.markings:
        for g in _pairs(net):
            if is_conflict(net, m, g):
                witnesses.append(_witness(result, m, g))
                if stop_at_first:
                    return _report("binary-conflict-free", witnesses, result)
    return _report("binary-conflict-free", witnesses, result)


def _candidate_steps(net: Net, m: Multiset, cap: int) -> Iterator[Multiset]:
    ranges = [range(min(step_bound(net, m, t), cap) + 1) for t in net.transition_ids]
    for counts in product(*ranges):
        g = Multiset({t: k for t, k in zip(net.transition_ids, counts) if k})
        if g:
            yield g


def conflict_free(net: Net, budget: Optional[ExplorationBudget] = None,
                  mult_cap: Optional[int] = None) -> ConflictReport:
    """No reachable marking has a conflict of any size.

    Multiplicities of t are capped by max{k : k·•t ⊆ M}; a larger count cannot occur in a
    conflict since G↾{t} would not be enabled. They are further capped by `mult_cap`.
    """
    cap = mult_cap if mult_cap is not None else CONFLICT_CONFIG['MULT_CAP']
    result = reachable_markings(net, budget)
    witnesses: List[ConflictWitness] = []
    capped = False
    for m in result.markings:
        if any(step_bound(net, m, t) > cap for t in net.transition_ids):
            capped = True
        for g in _candidate_steps(net, m, cap):
            if is_conflict(net, m, g):
                witnesses.append(_witness(result, m, g))
    notes = ["multiplicity of each transition bounded by max{k : k·•t ⊆ M}"]
    if capped:
        notes.append(f"multiplicities additionally capped at {cap}")
    report = _report("conflict-free", witnesses, result, notes)
    if capped and report.verdict == "holds":
        report.verdict = "bounded-holds"
    return report


def is_structural_conflict_net(net: Net, budget: Optional[ExplorationBudget] = None) -> ConflictReport:
    """Every reachable marking enabling {t,u} has •t ∩ •u = ∅, t = u included"""
    result = reachable_markings(net, budget)
    witnesses: List[ConflictWitness] = []
    for m in result.markings:
        for g in _pairs(net):
            t, u = list(g.elements())
            if not enabled_step(net, m, g):
                continue
            shared = set(net.pre(t)) & set(net.pre(u))
            if shared:
                witnesses.append(_witness(result, m, g))
    return _report("structural-conflict-net", witnesses, result)


def conflict_iff_shared_preplace(net: Net, budget: Optional[ExplorationBudget] = None) -> List[ConflictWitness]:
    """Counterexamples to: two enabled distinct transitions conflict iff they share a preplace"""
    result = reachable_markings(net, budget)
    counterexamples: List[ConflictWitness] = []
    for m in result.markings:
        for t, u in combinations_with_replacement(net.transition_ids, 2):
            if t == u or not (enabled_step(net, m, step(t)) and enabled_step(net, m, step(u))):
                continue
            g = step(t, u)
            shares = bool(set(net.pre(t)) & set(net.pre(u)))
            if is_conflict(net, m, g) != shares:
                counterexamples.append(_witness(result, m, g))
    return counterexamples


def first_witness_word(report: ConflictReport) -> Optional[Word]:
    if not report.witnesses:
        return None
    return tuple(report.witnesses[0].word)
