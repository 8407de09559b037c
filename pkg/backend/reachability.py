# Bounded enumeration of firing sequences and reachable markings
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional
import logging
import os

from multiset import Multiset
from net_model import Net, Word, enabled, fire

logger = logging.getLogger(__name__)

# Exploration bounds, overridable from the environment
REACHABILITY_CONFIG = {
    'MARKING_BUDGET': int(os.getenv('PROCNET_MARKING_BUDGET', '10000')),
    'DEPTH_BUDGET': int(os.getenv('PROCNET_DEPTH_BUDGET', '64')),
    'MAX_LEN': int(os.getenv('PROCNET_MAX_LEN', '6')),
}


@dataclass(frozen=True)
class ExplorationBudget:
    max_markings: int = REACHABILITY_CONFIG['MARKING_BUDGET']
    max_depth: int = REACHABILITY_CONFIG['DEPTH_BUDGET']

    def __post_init__(self):
        if self.max_markings <= 0 or self.max_depth <= 0:
            raise ValueError("exploration budget needs positive marking and depth limits")


@dataclass
class ReachabilityResult:
    """Markings in breadth-first discovery order, each with a shortest word reaching it"""

    markings: List[Multiset] = field(default_factory=list)
    words: Dict[Multiset, Word] = field(default_factory=dict)
    exhausted: bool = False

    @property
    def exhaustive(self) -> bool:
        return not self.exhausted

    def __contains__(self, marking: Multiset) -> bool:
        return marking in self.words

    def __len__(self) -> int:
        return len(self.markings)


@dataclass
class FiringSequenceEnumeration:
    words: List[Word]
    truncated: bool


def enumerate_firing_sequences_report(net: Net, max_len: int) -> FiringSequenceEnumeration:
    """FS(N) up to max_len in length-lexicographic order; truncated when a longest word still extends"""
    if max_len < 0:
        raise ValueError("max_len must be nonnegative")
    words: List[Word] = [()]
    level = [((), net.initial_marking)]
    truncated = False
    for depth in range(max_len + 1):
        next_level = []
        for word, marking in level:
            for t in net.transition_ids:
                if enabled(net, marking, t):
                    if depth == max_len:
                        truncated = True
                        break
                    next_level.append((word + (t,), fire(net, marking, t)))
        if depth == max_len:
            break
        words.extend(w for w, _ in next_level)
        level = next_level
        if not level:
            break
    logger.debug("Enumerated %d firing sequences of %s (max_len=%d, truncated=%s)",
                 len(words), net.name, max_len, truncated)
    return FiringSequenceEnumeration(words=words, truncated=truncated)


def enumerate_firing_sequences(net: Net, max_len: int) -> List[Word]:
    """Exactly the members of FS(N) of length <= max_len, prefix-closed and deterministic"""
    return enumerate_firing_sequences_report(net, max_len).words


def reachable_markings(net: Net, budget: Optional[ExplorationBudget] = None) -> ReachabilityResult:
    """Breadth-first marking exploration; `exhausted` flags a truncated (bounded) result"""
    budget = budget or ExplorationBudget()
    m0 = net.initial_marking
    result = ReachabilityResult(markings=[m0], words={m0: ()})
    queue = deque([(m0, 0)])
    while queue:
        marking, depth = queue.popleft()
        successors = [t for t in net.transition_ids if enabled(net, marking, t)]
        if depth >= budget.max_depth:
            if any(fire(net, marking, t) not in result.words for t in successors):
                result.exhausted = True
            continue
        for t in successors:
            nxt = fire(net, marking, t)
            if nxt in result.words:
                continue
            if len(result.markings) >= budget.max_markings:
                result.exhausted = True
                break
            result.words[nxt] = result.words[marking] + (t,)
            result.markings.append(nxt)
            queue.append((nxt, depth + 1))
    if result.exhausted:
        logger.warning("Reachability of %s truncated at %d markings", net.name, len(result.markings))
    else:
        logger.info("Explored %d reachable markings of %s", len(result.markings), net.name)
    return result


def is_reachable(net: Net, marking: Multiset, budget: Optional[ExplorationBudget] = None) -> bool:
    return marking in reachable_markings(net, budget)
