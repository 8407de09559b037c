# GR-processes: occurrence nets with labels, prefixes, isomorphism and enumeration
from functools import cached_property
from itertools import combinations, product
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple
import json
import logging

import networkx as nx
from networkx.algorithms.isomorphism import DiGraphMatcher, categorical_node_match
from pydantic import BaseModel, ConfigDict, Field

from multiset import Multiset
from net_errors import PreconditionError, ProcessValidationError, UnknownNodeError
from net_model import Net, enabled

logger = logging.getLogger(__name__)

PLACE = "place"
TRANSITION = "transition"

_node_match = categorical_node_match(["kind", "label"], [None, None])


class GRProcess(BaseModel):
    """A process (N', π) of a net, with places and transitions drawn from one integer id space.

    `places` and `transitions` hold π; arcs have unit weight.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    places: Dict[int, str] = Field(default_factory=dict, description="Occurrence place -> net place")
    transitions: Dict[int, str] = Field(default_factory=dict, description="Occurrence transition -> net transition")
    arcs: FrozenSet[Tuple[int, int]] = Field(default_factory=frozenset)
    initial_cut: FrozenSet[int] = Field(default_factory=frozenset, description="Places with empty preset")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GRProcess):
            return NotImplemented
        return (self.places == other.places and self.transitions == other.transitions
                and self.arcs == other.arcs and self.initial_cut == other.initial_cut)

    __hash__ = None

    def label(self, x: int) -> str:
        if x in self.places:
            return self.places[x]
        if x in self.transitions:
            return self.transitions[x]
        raise UnknownNodeError(x)

    def next_id(self) -> int:
        ids = list(self.places) + list(self.transitions)
        return max(ids) + 1 if ids else 0

    def occurrences(self, label: str) -> List[int]:
        """Transition ids carrying the given net transition, ascending"""
        return sorted(x for x, t in self.transitions.items() if t == label)

    def to_json(self) -> str:
        payload = {
            "places": {str(k): v for k, v in sorted(self.places.items())},
            "transitions": {str(k): v for k, v in sorted(self.transitions.items())},
            "arcs": [list(a) for a in sorted(self.arcs)],
            "initial_cut": sorted(self.initial_cut),
        }
        return json.dumps(payload, ensure_ascii=False, indent=2)

    @classmethod
    def from_json(cls, json_str: str) -> "GRProcess":
        try:
            data = json.loads(json_str)
        except json.JSONDecodeError as e:
            raise ValueError(f"Invalid JSON format: {e}") from e
        return cls.model_validate(data)

    def __str__(self) -> str:
        return f"GRProcess(|S|={len(self.places)}, |T|={len(self.transitions)})"


class ProcessStructure:
    """Adjacency and graph views of one process, computed once per analysis"""

    def __init__(self, process: GRProcess):
        self.process = process
        self.pre: Dict[int, List[int]] = {x: [] for x in list(process.places) + list(process.transitions)}
        self.post: Dict[int, List[int]] = {x: [] for x in self.pre}
        for x, y in sorted(process.arcs):
            if x in self.post:
                self.post[x].append(y)
            if y in self.pre:
                self.pre[y].append(x)

    @cached_property
    def graph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        for s, label in self.process.places.items():
            g.add_node(s, kind=PLACE, label=label, key=f"s:{label}")
        for t, label in self.process.transitions.items():
            g.add_node(t, kind=TRANSITION, label=label, key=f"t:{label}")
        g.add_edges_from(self.process.arcs)
        return g

    @cached_property
    def transition_dag(self) -> nx.DiGraph:
        """Immediate causality between transitions: t -> u when t• ∩ •u ≠ ∅"""
        g = nx.DiGraph()
        g.add_nodes_from(self.process.transitions)
        for t in self.process.transitions:
            for s in self.post[t]:
                for u in self.post[s]:
                    g.add_edge(t, u)
        return g

    @cached_property
    def end(self) -> FrozenSet[int]:
        return frozenset(s for s in self.process.places if not self.post[s])

    def end_marking(self) -> Multiset:
        return Multiset(self.process.places[s] for s in self.end)

    @cached_property
    def closure(self) -> nx.DiGraph:
        """Causality < as a graph: x -> y when a path leads from x to y"""
        try:
            return nx.transitive_closure_dag(self.graph)
        except nx.NetworkXUnfeasible:
            return nx.transitive_closure(self.graph, reflexive=False)

    def ancestors(self, x: int) -> FrozenSet[int]:
        return frozenset(self.closure.predecessors(x))

    def comparable(self, x: int, y: int) -> bool:
        return x == y or self.closure.has_edge(x, y) or self.closure.has_edge(y, x)


def structure(p: GRProcess) -> ProcessStructure:
    return ProcessStructure(p)


def process_graph(p: GRProcess) -> nx.DiGraph:
    return structure(p).graph


def empty_process(net: Net) -> GRProcess:
    """The process with no transitions: M0(s) initial places per place s, ids in place order"""
    places: Dict[int, str] = {}
    for s in net.place_ids:
        for _ in range(net.places[s]):
            places[len(places)] = s
    return GRProcess(places=places, transitions={}, arcs=frozenset(), initial_cut=frozenset(places))


def validate_process(p: GRProcess, net: Net) -> List[str]:
    """Reasons p is not a process of net, empty when it is"""
    violations = []
    shared = set(p.places) & set(p.transitions)
    for x in sorted(shared):
        violations.append(f"id {x} is both a place and a transition")
    nodes = set(p.places) | set(p.transitions)
    for x, y in sorted(p.arcs):
        if x not in nodes or y not in nodes:
            violations.append(f"arc ({x}, {y}) has an unknown endpoint")
        elif (x in p.places) == (y in p.places):
            violations.append(f"arc ({x}, {y}) does not connect a place and a transition")
    if violations:
        return violations

    view = structure(p)
    for s in sorted(p.places):
        if len(view.pre[s]) > 1:
            violations.append(f"place {s} has more than one input transition")
        if len(view.post[s]) > 1:
            violations.append(f"place {s} has more than one output transition")
    roots = frozenset(s for s in p.places if not view.pre[s])
    if roots != p.initial_cut:
        violations.append("initial cut is not the set of places with empty preset")
    if not nx.is_directed_acyclic_graph(view.graph):
        violations.append("arc relation has a cycle")
    for x in sorted(p.places):
        if p.places[x] not in net.places:
            violations.append(f"place {x} is labelled with unknown net place {p.places[x]}")
    for x in sorted(p.transitions):
        if p.transitions[x] not in net.transitions:
            violations.append(f"transition {x} is labelled with unknown net transition {p.transitions[x]}")
    if violations:
        return violations

    if Multiset(p.places[s] for s in p.initial_cut) != net.initial_marking:
        violations.append("π(initial cut) differs from the initial marking")
    for t in sorted(p.transitions):
        label = p.transitions[t]
        if Multiset(p.places[s] for s in view.pre[t]) != net.pre(label):
            violations.append(f"π does not preserve the preset of transition {t} ({label})")
        if Multiset(p.places[s] for s in view.post[t]) != net.post(label):
            violations.append(f"π does not preserve the postset of transition {t} ({label})")
    return violations


def check_process(p: GRProcess, net: Net) -> GRProcess:
    violations = validate_process(p, net)
    if violations:
        raise ProcessValidationError(violations)
    return p


def end_places(p: GRProcess) -> FrozenSet[int]:
    return structure(p).end


def end_marking(p: GRProcess) -> Multiset:
    """π(N'°), the marking reached by any linearization"""
    return structure(p).end_marking()


def label_multiset(p: GRProcess) -> Multiset:
    """How often each net transition occurs in p"""
    return Multiset(p.transitions.values())


def is_prefix(q: GRProcess, p: GRProcess) -> bool:
    """q ≤ p: q's nodes are a causally closed part of p with the same initial cut, arcs and labels"""
    if q.initial_cut != p.initial_cut:
        return False
    for x, label in q.places.items():
        if p.places.get(x) != label:
            return False
    for x, label in q.transitions.items():
        if p.transitions.get(x) != label:
            return False
    nodes = set(q.places) | set(q.transitions)
    restricted = frozenset((x, y) for x, y in p.arcs if x in nodes and y in nodes)
    if restricted != q.arcs:
        return False
    if not q.initial_cut <= set(q.places):
        return False
    view = structure(p)
    for t in q.transitions:
        if any(s not in q.places for s in view.pre[t] + view.post[t]):
            return False
    # a non-initial place needs its producer, otherwise q is not a process
    for s in q.places:
        if s not in q.initial_cut and any(t not in q.transitions for t in view.pre[s]):
            return False
    return True


def causal_past(p: GRProcess, x: int) -> FrozenSet[int]:
    """Transitions strictly preceding node x"""
    if x not in p.places and x not in p.transitions:
        raise UnknownNodeError(x)
    return frozenset(y for y in structure(p).ancestors(x) if y in p.transitions)


def _prefix(p: GRProcess, view: ProcessStructure, ts: FrozenSet[int]) -> GRProcess:
    places = set(p.initial_cut)
    for t in ts:
        places.update(view.post[t])
    nodes = places | ts
    return GRProcess(
        places={s: p.places[s] for s in places},
        transitions={t: p.transitions[t] for t in ts},
        arcs=frozenset((x, y) for x, y in p.arcs if x in nodes and y in nodes),
        initial_cut=p.initial_cut,
    )


def prefix_from_transitions(p: GRProcess, ts: Iterable[int]) -> GRProcess:
    """The prefix spanned by a causally closed set of transitions, their postplaces and the initial cut"""
    chosen = frozenset(ts)
    unknown = [t for t in chosen if t not in p.transitions]
    if unknown:
        raise UnknownNodeError(unknown[0])
    view = structure(p)
    for t in chosen:
        missing = causal_past(p, t) - chosen
        if missing:
            raise PreconditionError(
                f"transitions are not causally closed: {t} depends on {sorted(missing)}",
                error_code="NOT_CAUSALLY_CLOSED",
            )
    return _prefix(p, view, chosen)


def causal_prefixes(p: GRProcess) -> List[GRProcess]:
    """Every prefix of p, one per causally closed transition set, smallest first"""
    view = structure(p)
    dag = view.transition_dag
    ideals = set()
    for antichain in nx.antichains(dag):
        down = set(antichain)
        for t in antichain:
            down.update(nx.ancestors(dag, t))
        ideals.add(frozenset(down))
    ordered = sorted(ideals, key=lambda ideal: (len(ideal), sorted(ideal)))
    return [_prefix(p, view, ideal) for ideal in ordered]


def is_maximal(p: GRProcess, net: Net) -> bool:
    """No net transition is enabled at the end marking"""
    m = end_marking(p)
    return not any(enabled(net, m, t) for t in net.transition_ids)


def canonical_key(p: GRProcess) -> str:
    """Isomorphism-invariant bucket key; equal keys are necessary, not sufficient, for isomorphism"""
    g = structure(p).graph
    digest = nx.weisfeiler_lehman_graph_hash(g, node_attr="key", iterations=3)
    return f"{len(p.places)}:{len(p.transitions)}:{len(p.arcs)}:{digest}"


def find_isomorphism(p: GRProcess, q: GRProcess) -> Optional[Dict[int, int]]:
    """A label- and arc-preserving bijection from p's nodes onto q's, or None"""
    if (len(p.places), len(p.transitions), len(p.arcs)) != (len(q.places), len(q.transitions), len(q.arcs)):
        return None
    if label_multiset(p) != label_multiset(q) or Multiset(p.places.values()) != Multiset(q.places.values()):
        return None
    gp, gq = structure(p).graph, structure(q).graph
    matcher = DiGraphMatcher(gp, gq, node_match=_node_match)
    if not matcher.is_isomorphic():
        return None
    return dict(matcher.mapping)


def isomorphic(p: GRProcess, q: GRProcess) -> bool:
    return find_isomorphism(p, q) is not None


def check_isomorphism_witness(p: GRProcess, q: GRProcess, phi: Dict[int, int]) -> bool:
    """Verify that phi is a label-preserving graph isomorphism from p onto q"""
    p_nodes = set(p.places) | set(p.transitions)
    q_nodes = set(q.places) | set(q.transitions)
    if set(phi) != p_nodes or set(phi.values()) != q_nodes or len(set(phi.values())) != len(phi):
        return False
    for x in p.places:
        if q.places.get(phi[x]) != p.places[x]:
            return False
    for x in p.transitions:
        if q.transitions.get(phi[x]) != p.transitions[x]:
            return False
    return frozenset((phi[x], phi[y]) for x, y in p.arcs) == q.arcs


def fifo_choice(p: GRProcess, net: Net, t: str) -> Optional[List[int]]:
    """Oldest end places covering •t: smallest creation index first"""
    view = structure(p)
    chosen: List[int] = []
    for s, weight in net.pre(t).items_sorted():
        candidates = sorted(x for x in view.end if p.places[x] == s)
        if len(candidates) < weight:
            return None
        chosen.extend(candidates[:weight])
    return chosen


def token_choices(p: GRProcess, net: Net, t: str) -> Iterator[List[int]]:
    """Every way of selecting end places that π maps onto •t"""
    view = structure(p)
    per_place = []
    for s, weight in net.pre(t).items_sorted():
        candidates = sorted(x for x in view.end if p.places[x] == s)
        per_place.append(list(combinations(candidates, weight)))
    for picks in product(*per_place):
        yield [x for pick in picks for x in pick]


def extend_process(p: GRProcess, net: Net, t: str, chosen: Sequence[int]) -> GRProcess:
    """Append one occurrence of t consuming the chosen end places; new ids follow creation order"""
    view = structure(p)
    chosen_set = set(chosen)
    if len(chosen_set) != len(chosen) or not chosen_set <= view.end:
        raise PreconditionError(f"chosen places {sorted(chosen)} are not distinct end places")
    if Multiset(p.places[x] for x in chosen) != net.pre(t):
        raise PreconditionError(f"chosen places do not match the preset of {t}")
    next_id = p.next_id()
    new_t = next_id
    places = dict(p.places)
    transitions = dict(p.transitions)
    transitions[new_t] = t
    arcs = set(p.arcs)
    arcs.update((x, new_t) for x in chosen)
    next_id += 1
    for s in net.post(t).elements():
        places[next_id] = s
        arcs.add((new_t, next_id))
        next_id += 1
    return GRProcess(places=places, transitions=transitions, arcs=frozenset(arcs), initial_cut=p.initial_cut)


class ProcessIndex:
    """Isomorphism-class set keyed by canonical_key buckets"""

    def __init__(self):
        self._buckets: Dict[str, List[GRProcess]] = {}
        self.members: List[GRProcess] = []

    def find(self, p: GRProcess) -> Optional[GRProcess]:
        for other in self._buckets.get(canonical_key(p), []):
            if isomorphic(p, other):
                return other
        return None

    def add(self, p: GRProcess) -> bool:
        """Insert p unless an isomorphic member exists; report whether it was new"""
        key = canonical_key(p)
        bucket = self._buckets.setdefault(key, [])
        if any(isomorphic(p, other) for other in bucket):
            return False
        bucket.append(p)
        self.members.append(p)
        return True

    def keys(self) -> List[str]:
        return list(self._buckets)

    def __len__(self) -> int:
        return len(self.members)


def enumerate_processes(net: Net, max_transitions: int) -> List[GRProcess]:
    """All processes with at most max_transitions transitions, one per isomorphism class"""
    if max_transitions < 0:
        raise ValueError("max_transitions must be nonnegative")
    index = ProcessIndex()
    level = [empty_process(net)]
    index.add(level[0])
    for _ in range(max_transitions):
        next_level = []
        for p in level:
            m = end_marking(p)
            for t in net.transition_ids:
                if not enabled(net, m, t):
                    continue
                for chosen in token_choices(p, net, t):
                    q = extend_process(p, net, t, chosen)
                    if index.add(q):
                        next_level.append(q)
        if not next_level:
            break
        level = next_level
    logger.info("Enumerated %d processes of %s with at most %d transitions",
                len(index), net.name, max_transitions)
    return index.members
