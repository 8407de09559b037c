# Swapping equivalence of GR-processes and the prefix preorder on BD-processes
from collections import deque
from typing import Dict, Iterator, List, Optional, Sequence
import logging
import os

from pydantic import BaseModel, Field

from compat import some_linearization
from multiset import Multiset
from net_errors import InvalidSwapError, SearchBudgetExceeded
from net_model import Net
from process_model import (
    GRProcess,
    ProcessIndex,
    canonical_key,
    causal_prefixes,
    check_isomorphism_witness,
    check_process,
    find_isomorphism,
    isomorphic,
    label_multiset,
    structure,
)
from seqequiv import fs_le

logger = logging.getLogger(__name__)

SWAP_CONFIG = {
    'MAX_STATES': int(os.getenv('PROCNET_MAX_SWAP_STATES', '20000')),
    'CACHE_CLASSES': int(os.getenv('PROCNET_SWAP_CACHE_CLASSES', '256')),
}


class SwapMove(BaseModel):
    place_p: int
    place_q: int


class SwapCertificate(BaseModel):
    """Swaps replayed from `start`; `witness` maps the final process onto `target`"""

    start: GRProcess
    target: GRProcess
    moves: List[SwapMove] = Field(default_factory=list)
    witness: Dict[int, int] = Field(default_factory=dict)


def swap(p: GRProcess, move: SwapMove) -> GRProcess:
    """Exchange the outgoing arcs of two equally labelled, causally incomparable places"""
    a, b = move.place_p, move.place_q
    for x in (a, b):
        if x not in p.places:
            raise InvalidSwapError(f"swap needs two places, {x} is not a place of the process")
    if p.places[a] != p.places[b]:
        raise InvalidSwapError(f"places {a} and {b} carry different labels")
    view = structure(p)
    if a != b and view.comparable(a, b):
        raise InvalidSwapError(f"places {a} and {b} are causally comparable")
    if a == b:
        return p
    return _exchange(p, a, b)


def _exchange(p: GRProcess, a: int, b: int) -> GRProcess:
    """Swap without validation; callers pass a move from swap_moves"""
    renamed = {a: b, b: a}
    arcs = frozenset((renamed[x], y) if x in renamed else (x, y) for x, y in p.arcs)
    return GRProcess(places=p.places, transitions=p.transitions, arcs=arcs, initial_cut=p.initial_cut)


def swap_moves(p: GRProcess) -> Iterator[SwapMove]:
    """Moves that change the arc relation: distinct incomparable equal-label places, one with an outgoing arc"""
    view = structure(p)
    ids = sorted(p.places)
    for i, a in enumerate(ids):
        for b in ids[i + 1:]:
            if p.places[a] != p.places[b]:
                continue
            if not view.post[a] and not view.post[b]:
                continue
            if view.post[a] == view.post[b]:
                continue
            if view.comparable(a, b):
                continue
            yield SwapMove(place_p=a, place_q=b)


def one_step_equiv(p: GRProcess, q: GRProcess) -> bool:
    """P ≡₁ Q: some single swap of P (possibly the degenerate p = q) is isomorphic to Q"""
    if label_multiset(p) != label_multiset(q) or len(p.places) != len(q.places):
        return False
    if p.places and isomorphic(p, q):
        return True
    return any(isomorphic(swap(p, move), q) for move in swap_moves(p))


def _compatible_shapes(p: GRProcess, q: GRProcess) -> bool:
    return (label_multiset(p) == label_multiset(q)
            and Multiset(p.places.values()) == Multiset(q.places.values())
            and len(p.arcs) == len(q.arcs))


def _replay_moves(start: GRProcess, moves: Sequence[SwapMove]) -> GRProcess:
    current = start
    for move in moves:
        current = swap(current, move)
    return current


def swap_star_certificate(p: GRProcess, q: GRProcess,
                          max_states: Optional[int] = None) -> Optional[SwapCertificate]:
    """Breadth-first search over swap moves from p, deduplicated up to isomorphism"""
    if not _compatible_shapes(p, q):
        return None
    witness = find_isomorphism(p, q)
    if witness is not None:
        return SwapCertificate(start=p, target=q, moves=[], witness=witness)
    limit = max_states or SWAP_CONFIG['MAX_STATES']
    target_key = canonical_key(q)
    index = ProcessIndex()
    index.add(p)
    queue = deque([(p, [])])
    while queue:
        current, path = queue.popleft()
        for move in swap_moves(current):
            nxt = _exchange(current, move.place_p, move.place_q)
            if not index.add(nxt):
                continue
            if len(index) > limit:
                raise SearchBudgetExceeded(f"swap search exceeded {limit} states", details={"limit": limit})
            moves = path + [move]
            if canonical_key(nxt) == target_key:
                witness = find_isomorphism(nxt, q)
                if witness is not None:
                    logger.debug("Swap certificate found with %d moves", len(moves))
                    return SwapCertificate(start=p, target=q, moves=moves, witness=witness)
            queue.append((nxt, moves))
    return None


def _explore_class(p: GRProcess, limit: int) -> ProcessIndex:
    index = ProcessIndex()
    index.add(p)
    queue = deque([p])
    while queue:
        current = queue.popleft()
        for move in swap_moves(current):
            nxt = _exchange(current, move.place_p, move.place_q)
            if index.add(nxt):
                if len(index) > limit:
                    raise SearchBudgetExceeded(f"swap class exceeded {limit} states", details={"limit": limit})
                queue.append(nxt)
    return index


class SwapClassCache:
    """Explored swap classes, found again from any of their members through canonical keys"""

    def __init__(self, capacity: int):
        self.capacity = capacity
        self._classes: List[ProcessIndex] = []
        self._by_key: Dict[str, List[int]] = {}

    def lookup(self, p: GRProcess) -> Optional[ProcessIndex]:
        for i in self._by_key.get(canonical_key(p), []):
            if self._classes[i].find(p) is not None:
                return self._classes[i]
        return None

    def class_of(self, p: GRProcess) -> ProcessIndex:
        cached = self.lookup(p)
        if cached is not None:
            return cached
        index = _explore_class(p, SWAP_CONFIG['MAX_STATES'])
        if len(self._classes) >= self.capacity:
            logger.debug("Swap class cache full at %d classes, clearing", len(self._classes))
            self.clear()
        self._classes.append(index)
        for key in index.keys():
            self._by_key.setdefault(key, []).append(len(self._classes) - 1)
        return index

    def clear(self) -> None:
        self._classes.clear()
        self._by_key.clear()

    def __len__(self) -> int:
        return len(self._classes)


_CLASS_CACHE = SwapClassCache(SWAP_CONFIG['CACHE_CLASSES'])


def swap_star_equiv(p: GRProcess, q: GRProcess) -> bool:
    """P ≡₁* Q, decided by membership of q in the cached swap class of p"""
    if not _compatible_shapes(p, q):
        return False
    if isomorphic(p, q):
        return True
    return _CLASS_CACHE.class_of(p).find(q) is not None


def swap_class(p: GRProcess, max_states: Optional[int] = None) -> List[GRProcess]:
    """Representatives of every isomorphism class reachable from p by swaps.

    An explicit max_states explores afresh; otherwise the class comes from the shared cache.
    """
    if max_states is not None:
        return list(_explore_class(p, max_states).members)
    return list(_CLASS_CACHE.class_of(p).members)


def replay_swap_certificate(cert: SwapCertificate) -> bool:
    """Apply the recorded swaps and check the final isomorphism witness"""
    try:
        final = _replay_moves(cert.start, cert.moves)
    except InvalidSwapError as e:
        logger.warning("Swap certificate does not replay: %s", e)
        return False
    return check_isomorphism_witness(final, cert.target, cert.witness)


def bd_le(p: GRProcess, q: GRProcess, net: Net, direct: bool = False) -> bool:
    """[P]≡₁* ⊑ [Q]≡₁* for finite processes, decided through linearizations by default"""
    check_process(p, net)
    check_process(q, net)
    if direct:
        return bd_le_direct(p, q, net)
    return fs_le(net, some_linearization(p, net), some_linearization(q, net))


def bd_le_direct(p: GRProcess, q: GRProcess, net: Net) -> bool:
    """Search a prefix Q' of q and a member of its swap class having a prefix isomorphic to p"""
    check_process(p, net)
    check_process(q, net)
    needed = label_multiset(p)
    if not needed.leq(label_multiset(q)):
        return False
    for q_prefix in causal_prefixes(q):
        if not needed.leq(label_multiset(q_prefix)):
            continue
        for member in swap_class(q_prefix):
            for candidate in causal_prefixes(member):
                if label_multiset(candidate) == needed and isomorphic(candidate, p):
                    return True
    return False


def bd_equiv(p: GRProcess, q: GRProcess, net: Net) -> bool:
    return bd_le(p, q, net) and bd_le(q, p, net)


def bd_classes(universe: Sequence[GRProcess], net: Net) -> List[List[GRProcess]]:
    """Partition processes into BD-classes, comparing each against one representative per class"""
    classes: List[List[GRProcess]] = []
    for p in universe:
        for members in classes:
            if bd_equiv(members[0], p, net):
                members.append(p)
                break
        else:
            classes.append([p])
    logger.info("Partitioned %d processes into %d BD-classes", len(universe), len(classes))
    return classes
