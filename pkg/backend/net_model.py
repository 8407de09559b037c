# Place/transition net model and token game
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple, Union
import logging

from pydantic import BaseModel, ConfigDict, Field, NonNegativeInt, field_validator

from multiset import Multiset, msum
from net_errors import NotEnabledError, NotFiringSequenceError, UnknownNodeError

logger = logging.getLogger(__name__)

# A finite word of transition identifiers
Word = Tuple[str, ...]


class TransitionSpec(BaseModel):
    """Weighted pre- and postplaces of one transition"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    inputs: Dict[str, NonNegativeInt] = Field(default_factory=dict, description="F(s, t) per preplace s")
    outputs: Dict[str, NonNegativeInt] = Field(default_factory=dict, description="F(t, s) per postplace s")


class Net(BaseModel):
    """A net (S, T, F, M0); arc weights are stored as integers, not parallel arcs"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = Field(default="net", min_length=1, max_length=200)
    places: Dict[str, NonNegativeInt] = Field(..., description="Places with their initial token count")
    transitions: Dict[str, TransitionSpec] = Field(default_factory=dict)

    @field_validator("places", "transitions")
    @classmethod
    def validate_identifiers(cls, v):
        for key in v:
            if not key or not key.strip() or any(ch.isspace() for ch in key):
                raise ValueError(f"invalid node identifier: {key!r}")
        return v

    @property
    def initial_marking(self) -> Multiset:
        return Multiset(self.places)

    @property
    def place_ids(self) -> List[str]:
        return sorted(self.places)

    @property
    def transition_ids(self) -> List[str]:
        return sorted(self.transitions)

    def pre(self, t: str) -> Multiset:
        if t not in self.transitions:
            raise UnknownNodeError(t)
        return Multiset(self.transitions[t].inputs)

    def post(self, t: str) -> Multiset:
        if t not in self.transitions:
            raise UnknownNodeError(t)
        return Multiset(self.transitions[t].outputs)

    def is_transition(self, x: str) -> bool:
        return x in self.transitions

    def is_place(self, x: str) -> bool:
        return x in self.places


def validate(net: Net) -> List[str]:
    """Return one entry per offending node; empty means the net is well formed"""
    violations = []
    for x in sorted(set(net.places) & set(net.transitions)):
        violations.append(f"not disjoint: {x} is both a place and a transition")
    for t in net.transition_ids:
        spec = net.transitions[t]
        if not any(w > 0 for w in spec.inputs.values()):
            violations.append(f"empty preset: transition {t}")
        for s in sorted(set(spec.inputs) | set(spec.outputs)):
            if s not in net.places:
                violations.append(f"unknown place {s} in arcs of transition {t}")
    if violations:
        logger.debug("Net %s has %d violations", net.name, len(violations))
    return violations


def _node_preset(net: Net, x: str) -> Multiset:
    if x in net.transitions:
        return net.pre(x)
    if x in net.places:
        return Multiset({t: spec.outputs.get(x, 0) for t, spec in net.transitions.items()})
    raise UnknownNodeError(x)


def _node_postset(net: Net, x: str) -> Multiset:
    if x in net.transitions:
        return net.post(x)
    if x in net.places:
        return Multiset({t: spec.inputs.get(x, 0) for t, spec in net.transitions.items()})
    raise UnknownNodeError(x)


def preset(net: Net, x: Union[str, Multiset]) -> Multiset:
    """•x for a node, or •X = Σ X(x)·•x for a finite multiset of nodes"""
    if isinstance(x, Multiset):
        return msum(_node_preset(net, node).scale(k) for node, k in x.items())
    return _node_preset(net, x)


def postset(net: Net, x: Union[str, Multiset]) -> Multiset:
    """x• for a node, or X• = Σ X(x)·x• for a finite multiset of nodes"""
    if isinstance(x, Multiset):
        return msum(_node_postset(net, node).scale(k) for node, k in x.items())
    return _node_postset(net, x)


def _check_step(net: Net, g: Multiset) -> None:
    if not g:
        raise ValueError("a step must be a non-empty multiset of transitions")
    for t in g:
        if t not in net.transitions:
            raise UnknownNodeError(t)


def enabled_step(net: Net, m: Multiset, g: Multiset) -> bool:
    """M[G⟩ iff •G ⊆ M"""
    _check_step(net, g)
    return preset(net, g).leq(m)


def fire_step(net: Net, m: Multiset, g: Multiset) -> Multiset:
    """(M − •G) + G•, defined only when G is enabled at M"""
    _check_step(net, g)
    consumed = preset(net, g)
    if not consumed.leq(m):
        raise NotEnabledError(f"step {g} is not enabled at {m}")
    return m.difference(consumed).sum(postset(net, g))


def enabled(net: Net, m: Multiset, t: str) -> bool:
    return net.pre(t).leq(m)


def fire(net: Net, m: Multiset, t: str) -> Multiset:
    """Fire the singleton step {t}"""
    consumed = net.pre(t)
    if not consumed.leq(m):
        raise NotEnabledError(f"transition {t} is not enabled at {m}")
    return m.difference(consumed).sum(net.post(t))


@dataclass(frozen=True)
class NotFirable:
    """fireWord result variant: the word stops at `index`"""

    index: int


def fire_word(net: Net, m: Multiset, word: Sequence[str]) -> Union[Multiset, NotFirable]:
    """Iterate singleton steps; return the unique final marking or the first failing position"""
    current = m
    for i, t in enumerate(word):
        if t not in net.transitions:
            raise UnknownNodeError(t)
        if not enabled(net, current, t):
            return NotFirable(i)
        current = fire(net, current, t)
    return current


def reach(net: Net, word: Sequence[str]) -> Multiset:
    """Marking reached from M0 by a firing sequence; raises when the word is not one"""
    outcome = fire_word(net, net.initial_marking, word)
    if isinstance(outcome, NotFirable):
        raise NotFiringSequenceError(word, outcome.index)
    return outcome


def is_firing_sequence(net: Net, word: Sequence[str]) -> bool:
    return not isinstance(fire_word(net, net.initial_marking, word), NotFirable)


def firing_sequence(net: Net, word: Iterable[str]) -> Word:
    """Validate a word against the token game and return it as a FiringSequence tuple"""
    w = tuple(word)
    reach(net, w)
    return w


def enabled_transitions(net: Net, m: Multiset) -> List[str]:
    return [t for t in net.transition_ids if enabled(net, m, t)]


def step(*transitions: str) -> Multiset:
    """Step literal: step('a', 'b') == {a:1, b:1}"""
    return Multiset(transitions)
