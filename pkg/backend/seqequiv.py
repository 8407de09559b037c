# Adjacent-transposition equivalence of firing sequences and the prefix preorder built on it
from collections import deque
from typing import Dict, Iterator, List, Optional, Sequence, Tuple
import heapq
import logging
import os

from pydantic import BaseModel, ConfigDict, Field

from multiset import Multiset
from net_errors import PreconditionError, ProcNetError, SearchBudgetExceeded
from net_model import Net, NotFirable, Word, enabled_step, fire, fire_word, reach, step

logger = logging.getLogger(__name__)

SEQ_CONFIG = {
    'MAX_CLASS_SIZE': int(os.getenv('PROCNET_MAX_CLASS_SIZE', '50000')),
    'MAX_WORD_LEN': int(os.getenv('PROCNET_MAX_WORD_LEN', '8')),
}


class Transposition(BaseModel):
    """Exchange of `first` and `second` at positions position, position+1; `marking` enables both at once"""

    model_config = ConfigDict(frozen=True)

    position: int = Field(..., ge=0)
    first: str
    second: str
    marking: Dict[str, int] = Field(default_factory=dict, description="Marking reached by the shared prefix")


class AdjacencyCertificate(BaseModel):
    """A chain of single transpositions turning `source` into `target`"""

    source: List[str]
    target: List[str]
    steps: List[Transposition] = Field(default_factory=list)

    @property
    def length(self) -> int:
        return len(self.steps)


def check_word_length(*words: Sequence[str]) -> None:
    """Reject any word longer than SEQ_CONFIG['MAX_WORD_LEN']"""
    limit = SEQ_CONFIG['MAX_WORD_LEN']
    for word in words:
        if len(word) > limit:
            raise ProcNetError(f"words are limited to {limit} transitions, got {len(word)}",
                               error_code="WORD_TOO_LONG", details={"limit": limit, "length": len(word)})


def _prefix_markings(net: Net, word: Word) -> List[Multiset]:
    markings = [net.initial_marking]
    for t in word:
        markings.append(fire(net, markings[-1], t))
    return markings


def _transpose(word: Word, i: int) -> Word:
    return word[:i] + (word[i + 1], word[i]) + word[i + 2:]


def transposition_moves(net: Net, word: Word) -> Iterator[Tuple[Transposition, Word]]:
    """Every single transposition applicable to a firing sequence, with its result"""
    markings = _prefix_markings(net, word)
    for i in range(len(word) - 1):
        t, u = word[i], word[i + 1]
        if t == u:
            continue
        if enabled_step(net, markings[i], step(t, u)):
            yield Transposition(position=i, first=t, second=u, marking=markings[i].to_dict()), _transpose(word, i)


def adjacent(net: Net, sigma: Sequence[str], rho: Sequence[str]) -> bool:
    """σ ≡₀ ρ: ρ arises from σ by exchanging one adjacent pair fired as a step"""
    sigma, rho = tuple(sigma), tuple(rho)
    reach(net, sigma)
    reach(net, rho)
    if len(sigma) != len(rho):
        return False
    markings = _prefix_markings(net, sigma)
    for i in range(len(sigma) - 1):
        if _transpose(sigma, i) == rho and enabled_step(net, markings[i], step(sigma[i], sigma[i + 1])):
            return True
    return False


def _check_budget(size: int, limit: int, what: str) -> None:
    if size > limit:
        raise SearchBudgetExceeded(f"{what} exceeded {limit} states", details={"limit": limit})


def _path(parents: Dict[Word, Optional[Tuple[Word, Transposition]]], word: Word) -> List[Transposition]:
    steps = []
    while parents[word] is not None:
        prev, move = parents[word]
        steps.append(move)
        word = prev
    steps.reverse()
    return steps


def seq_star_certificate(net: Net, sigma: Sequence[str], rho: Sequence[str],
                         max_states: Optional[int] = None) -> Optional[AdjacencyCertificate]:
    """Breadth-first search for a transposition chain from σ to ρ; None when they are not ≡₀*"""
    sigma, rho = tuple(sigma), tuple(rho)
    reach(net, sigma)
    reach(net, rho)
    if Multiset(sigma) != Multiset(rho):
        return None
    limit = max_states or SEQ_CONFIG['MAX_CLASS_SIZE']
    parents: Dict[Word, Optional[Tuple[Word, Transposition]]] = {sigma: None}
    queue = deque([sigma])
    while queue:
        word = queue.popleft()
        if word == rho:
            return AdjacencyCertificate(source=list(sigma), target=list(rho), steps=_path(parents, word))
        for move, nxt in transposition_moves(net, word):
            if nxt not in parents:
                parents[nxt] = (word, move)
                _check_budget(len(parents), limit, "sequence class search")
                queue.append(nxt)
    return None


def seq_star_equiv(net: Net, sigma: Sequence[str], rho: Sequence[str]) -> bool:
    """σ ≡₀* ρ"""
    return seq_star_certificate(net, sigma, rho) is not None


def seq_class(net: Net, sigma: Sequence[str], max_states: Optional[int] = None) -> List[Word]:
    """The full ≡₀*-class of a firing sequence, sorted"""
    sigma = tuple(sigma)
    reach(net, sigma)
    limit = max_states or SEQ_CONFIG['MAX_CLASS_SIZE']
    seen = {sigma}
    queue = deque([sigma])
    while queue:
        word = queue.popleft()
        for _, nxt in transposition_moves(net, word):
            if nxt not in seen:
                seen.add(nxt)
                _check_budget(len(seen), limit, "sequence class enumeration")
                queue.append(nxt)
    return sorted(seen)


def _shared_prefix(word: Word, target: Word) -> int:
    n = 0
    for a, b in zip(word, target):
        if a != b:
            break
        n += 1
    return n


def _class_member_with_prefix(net: Net, start: Word, prefix: Word, limit: int) -> Optional[AdjacencyCertificate]:
    """Best-first walk of start's class, preferring words agreeing longer with prefix"""
    parents: Dict[Word, Optional[Tuple[Word, Transposition]]] = {start: None}
    counter = 0
    heap = [(-_shared_prefix(start, prefix), counter, start)]
    while heap:
        _, _, word = heapq.heappop(heap)
        if word[: len(prefix)] == prefix:
            return AdjacencyCertificate(source=list(start), target=list(word), steps=_path(parents, word))
        for move, nxt in transposition_moves(net, word):
            if nxt not in parents:
                parents[nxt] = (word, move)
                _check_budget(len(parents), limit, "prefix search")
                counter += 1
                heapq.heappush(heap, (-_shared_prefix(nxt, prefix), counter, nxt))
    return None


def reverse_certificate(cert: AdjacencyCertificate) -> AdjacencyCertificate:
    """The same chain walked backwards; every recorded marking stays valid"""
    steps = [Transposition(position=s.position, first=s.second, second=s.first, marking=s.marking)
             for s in reversed(cert.steps)]
    return AdjacencyCertificate(source=list(cert.target), target=list(cert.source), steps=steps)


def fs_le_witness(net: Net, sigma: Sequence[str], rho: Sequence[str],
                  max_states: Optional[int] = None) -> Optional[Tuple[Word, Word, AdjacencyCertificate]]:
    """Return (σ', ρ', chain σ' → ρ') with σ ≤ σ', ρ' ≤ ρ, or None when σ ⋢₀∞ ρ"""
    sigma, rho = tuple(sigma), tuple(rho)
    reach(net, sigma)
    reach(net, rho)
    limit = max_states or SEQ_CONFIG['MAX_CLASS_SIZE']
    needed = Multiset(sigma)
    for k in range(len(sigma), len(rho) + 1):
        rho_prime = rho[:k]
        if not needed.leq(Multiset(rho_prime)):
            continue
        found = _class_member_with_prefix(net, rho_prime, sigma, limit)
        if found is not None:
            chain = reverse_certificate(found)
            return tuple(chain.source), rho_prime, chain
    return None


def fs_le(net: Net, sigma: Sequence[str], rho: Sequence[str]) -> bool:
    """σ ⊑₀∞ ρ for finite firing sequences"""
    return fs_le_witness(net, sigma, rho) is not None


def fs_equiv(net: Net, sigma: Sequence[str], rho: Sequence[str]) -> bool:
    return fs_le(net, sigma, rho) and fs_le(net, rho, sigma)


def prefix_agree(sigma: Sequence[str], rho: Sequence[str], n: int) -> bool:
    """σ ₙ= ρ: equal, or of equal length at least n and agreeing on the first n letters"""
    sigma, rho = tuple(sigma), tuple(rho)
    if sigma == rho:
        return True
    return len(sigma) == len(rho) and len(sigma) >= n and sigma[:n] == rho[:n]


def replay_adjacency_certificate(net: Net, cert: AdjacencyCertificate) -> bool:
    """Re-check every transposition against the token game"""
    word = tuple(cert.source)
    if isinstance(fire_word(net, net.initial_marking, word), NotFirable):
        return False
    for s in cert.steps:
        i = s.position
        if i + 1 >= len(word) or word[i] != s.first or word[i + 1] != s.second:
            return False
        marking = fire_word(net, net.initial_marking, word[:i])
        if marking != Multiset(s.marking) or not enabled_step(net, marking, step(s.first, s.second)):
            return False
        word = _transpose(word, i)
    return word == tuple(cert.target)


def compose_certificates(first: AdjacencyCertificate, second: AdjacencyCertificate) -> AdjacencyCertificate:
    if first.target != second.source:
        raise ValueError("certificates do not chain: target and source differ")
    return AdjacencyCertificate(source=first.source, target=second.target, steps=first.steps + second.steps)


def extend_certificate(cert: AdjacencyCertificate, suffix: Sequence[str]) -> AdjacencyCertificate:
    """Append a common suffix to both ends; positions and markings are unaffected"""
    suffix = list(suffix)
    return AdjacencyCertificate(source=cert.source + suffix, target=cert.target + suffix, steps=list(cert.steps))


def identity_certificate(word: Sequence[str]) -> AdjacencyCertificate:
    return AdjacencyCertificate(source=list(word), target=list(word), steps=[])


def reorder_after_prefix(net: Net, sigma1: Sequence[str], sigma2: Sequence[str],
                         sigma3: Sequence[str]) -> Word:
    """Given σ1 ≡₀* σ2 ≤ σ3, return σ4 = σ1·(σ3 after σ2), which satisfies σ1 ≤ σ4 ≡₀* σ3"""
    sigma1, sigma2, sigma3 = tuple(sigma1), tuple(sigma2), tuple(sigma3)
    reach(net, sigma3)
    if sigma3[: len(sigma2)] != sigma2:
        raise PreconditionError("σ2 is not a prefix of σ3", error_code="NOT_A_PREFIX")
    chain = seq_star_certificate(net, sigma2, sigma1)
    if chain is None:
        raise PreconditionError("σ1 and σ2 are not ≡₀*-equivalent", error_code="NOT_EQUIVALENT")
    word = sigma3
    for s in chain.steps:
        # transpositions stay inside the shared prefix, so each one still fires at the same marking
        word = _transpose(word, s.position)
    if word[: len(sigma1)] != sigma1:
        raise PreconditionError("transposition chain did not reproduce σ1", error_code="NOT_EQUIVALENT")
    reach(net, word)
    return word


def localize_swaps(net: Net, sigma_pp: Sequence[str], rho_dagger: Sequence[str],
                   rho: Sequence[str]) -> Tuple[Word, Word]:
    """Given σ'' ≤ ρ† ≡₀* ρ, return finite prefixes (ρ†', ρ') with σ'' ≤ ρ†', ρ†' ≡₀* ρ', ρ' ≤ ρ"""
    sigma_pp, rho_dagger, rho = tuple(sigma_pp), tuple(rho_dagger), tuple(rho)
    if rho_dagger[: len(sigma_pp)] != sigma_pp:
        raise PreconditionError("σ'' is not a prefix of ρ†", error_code="NOT_A_PREFIX")
    chain = seq_star_certificate(net, rho_dagger, rho)
    if chain is None:
        raise PreconditionError("ρ† and ρ are not ≡₀*-equivalent", error_code="NOT_EQUIVALENT")
    bound = max((s.position + 2 for s in chain.steps), default=0)
    bound = max(bound, len(sigma_pp))
    return rho_dagger[:bound], rho[:bound]
