# Diamond closing in binary-conflict-free nets and the largest FS-/BD-process construction
from typing import List, Optional, Sequence, Tuple
import logging
import os

from pydantic import BaseModel, Field

from compat import process_of
from conflict import ConflictReport, ConflictWitness, binary_conflict_free
from net_errors import ConflictPreconditionError, PreconditionError, ProcNetError
from net_model import Net, Word, enabled_step, reach, step
from process_model import GRProcess, enumerate_processes
from reachability import ExplorationBudget, enumerate_firing_sequences_report
from seqequiv import (
    AdjacencyCertificate,
    Transposition,
    compose_certificates,
    extend_certificate,
    fs_le,
    identity_certificate,
    replay_adjacency_certificate,
    reverse_certificate,
)
from swapping import bd_le

logger = logging.getLogger(__name__)

DIAMOND_CONFIG = {
    'ENUM_BOUND': int(os.getenv('PROCNET_ENUM_BOUND', '4')),
}


class DiamondResult(BaseModel):
    """Completions (μ, μ') with σμ ≡₀* σ'μ', and the chain σμ → σ'μ'"""

    mu: List[str]
    mu_prime: List[str]
    certificate: AdjacencyCertificate


class SequenceCover(BaseModel):
    """σᵢ ≤ σ'ᵢ ≡₀* ρᵢ ≤ ρ, with the chain σ'ᵢ → ρᵢ"""

    sigma: List[str]
    sigma_prime: List[str]
    rho_i: List[str]
    certificate: AdjacencyCertificate


class LargestProcessWitness(BaseModel):
    rho: List[str]
    chain: List[List[str]] = Field(default_factory=list, description="ρ₁ ≤ ρ₂ ≤ ... ≤ ρ")
    covers: List[SequenceCover] = Field(default_factory=list)
    enum_bound: int
    truncated: bool = False


def _lazy_conflict(net: Net, prefix: Word, t: str, u: str) -> ConflictPreconditionError:
    m = reach(net, prefix)
    witness = ConflictWitness(marking=m.to_dict(), step=step(t, u).to_dict(), word=list(prefix))
    report = ConflictReport(property="binary-conflict-free", verdict="fails", witnesses=[witness],
                            markings_explored=0, exhaustive=False,
                            notes=["detected while closing a diamond"])
    return ConflictPreconditionError(report)


def require_binary_conflict_free(net: Net, budget: Optional[ExplorationBudget] = None) -> ConflictReport:
    report = binary_conflict_free(net, budget, stop_at_first=True)
    if report.verdict == "fails":
        raise ConflictPreconditionError(report)
    return report


def _swap_pair(net: Net, sigma: Word, t: str, u: str) -> AdjacencyCertificate:
    if t == u:
        raise PreconditionError("swap_pair needs two distinct transitions", error_code="SAME_TRANSITION")
    reach(net, sigma + (t,))
    reach(net, sigma + (u,))
    m = reach(net, sigma)
    if not enabled_step(net, m, step(t, u)):
        raise _lazy_conflict(net, sigma, t, u)
    move = Transposition(position=len(sigma), first=t, second=u, marking=m.to_dict())
    return AdjacencyCertificate(source=list(sigma + (t, u)), target=list(sigma + (u, t)), steps=[move])


def _commute_out(net: Net, sigma: Word, t: str, rho: Word) -> AdjacencyCertificate:
    """σtρ → σρt, by induction on ρ"""
    if t in rho:
        raise PreconditionError(f"{t} occurs in the word it should commute past", error_code="OCCURS_IN_WORD")
    cert = identity_certificate(sigma + (t,) + rho)
    prefix = sigma
    for i, u in enumerate(rho):
        rest = rho[i + 1:]
        moved = extend_certificate(_swap_pair(net, prefix, t, u), rest)
        cert = compose_certificates(cert, moved)
        prefix = prefix + (u,)
    return cert


def _commute_in(net: Net, sigma: Word, t: str, rho1: Word, rho2: Word) -> AdjacencyCertificate:
    """σtρ₁ρ₂ → σρ₁tρ₂"""
    reach(net, sigma + (t,))
    reach(net, sigma + rho1 + (t,) + rho2)
    return extend_certificate(_commute_out(net, sigma, t, rho1), rho2)


def _close_diamond(net: Net, sigma: Word, sigma_prime: Word) -> Tuple[Word, Word, AdjacencyCertificate]:
    mu, mu_prime = sigma_prime, ()
    cert = identity_certificate(sigma_prime)
    for i, t in enumerate(sigma):
        prefix = sigma[:i]
        if t in mu:
            j = mu.index(t)
            rho1, rho2 = mu[:j], mu[j + 1:]
            head = _commute_in(net, prefix, t, rho1, rho2)
            cert = compose_certificates(head, cert)
            mu = rho1 + rho2
        else:
            head = _commute_out(net, prefix, t, mu)
            cert = compose_certificates(head, extend_certificate(cert, [t]))
            mu_prime = mu_prime + (t,)
    return mu, mu_prime, cert


def swap_pair(net: Net, sigma: Sequence[str], t: str, u: str,
              budget: Optional[ExplorationBudget] = None) -> AdjacencyCertificate:
    """Certify σtu ≡₀* σut in a binary-conflict-free net"""
    require_binary_conflict_free(net, budget)
    return _swap_pair(net, tuple(sigma), t, u)


def commute_out(net: Net, sigma: Sequence[str], t: str, rho: Sequence[str],
                budget: Optional[ExplorationBudget] = None) -> AdjacencyCertificate:
    """Certify σtρ ≡₀* σρt when t ∉ ρ"""
    require_binary_conflict_free(net, budget)
    sigma, rho = tuple(sigma), tuple(rho)
    reach(net, sigma + (t,))
    reach(net, sigma + rho)
    return _commute_out(net, sigma, t, rho)


def commute_in(net: Net, sigma: Sequence[str], t: str, rho1: Sequence[str], rho2: Sequence[str],
               budget: Optional[ExplorationBudget] = None) -> AdjacencyCertificate:
    """Certify σtρ₁ρ₂ ≡₀* σρ₁tρ₂ when t ∉ ρ₁"""
    require_binary_conflict_free(net, budget)
    return _commute_in(net, tuple(sigma), t, tuple(rho1), tuple(rho2))


def close_diamond(net: Net, sigma: Sequence[str], sigma_prime: Sequence[str],
                  budget: Optional[ExplorationBudget] = None) -> DiamondResult:
    """Find μ, μ' with σμ, σ'μ' firing and σμ ≡₀* σ'μ'"""
    require_binary_conflict_free(net, budget)
    sigma, sigma_prime = tuple(sigma), tuple(sigma_prime)
    reach(net, sigma)
    reach(net, sigma_prime)
    mu, mu_prime, cert = _close_diamond(net, sigma, sigma_prime)
    return DiamondResult(mu=list(mu), mu_prime=list(mu_prime), certificate=cert)


def largest_fs_process(net: Net, enum_bound: Optional[int] = None,
                       budget: Optional[ExplorationBudget] = None) -> LargestProcessWitness:
    """Build ρ with σ ⊑₀∞ ρ for every firing sequence of length ≤ enum_bound.

    ρ₁ = σ₁ and ρᵢ₊₁ = ρᵢμ where (μ, μ') closes the diamond of ρᵢ and σᵢ₊₁.
    """
    bound = enum_bound if enum_bound is not None else DIAMOND_CONFIG['ENUM_BOUND']
    require_binary_conflict_free(net, budget)
    enumeration = enumerate_firing_sequences_report(net, bound)
    words = enumeration.words
    rho: Word = words[0]
    chain = [list(rho)]
    covers = [SequenceCover(sigma=list(rho), sigma_prime=list(rho), rho_i=list(rho),
                            certificate=identity_certificate(rho))]
    for sigma in words[1:]:
        mu, mu_prime, cert = _close_diamond(net, rho, sigma)
        rho = rho + mu
        chain.append(list(rho))
        covers.append(SequenceCover(sigma=list(sigma), sigma_prime=list(sigma + mu_prime),
                                    rho_i=list(rho), certificate=reverse_certificate(cert)))
    if enumeration.truncated:
        logger.warning("Firing sequences of %s extend beyond bound %d; ρ covers the enumerated part only",
                       net.name, bound)
    logger.info("Largest FS-process candidate for %s has length %d (%d sequences covered)",
                net.name, len(rho), len(words))
    return LargestProcessWitness(rho=list(rho), chain=chain, covers=covers, enum_bound=bound,
                                 truncated=enumeration.truncated)


def check_cover(net: Net, witness: LargestProcessWitness, cover: SequenceCover) -> bool:
    """Replay one σᵢ ≤ σ'ᵢ ≡₀* ρᵢ ≤ ρ link"""
    sigma, sigma_prime, rho_i = cover.sigma, cover.sigma_prime, cover.rho_i
    return (sigma_prime[: len(sigma)] == sigma
            and cover.certificate.source == sigma_prime
            and cover.certificate.target == rho_i
            and witness.rho[: len(rho_i)] == rho_i
            and replay_adjacency_certificate(net, cover.certificate))


def largest_bd_witness(net: Net, enum_bound: Optional[int] = None,
                       budget: Optional[ExplorationBudget] = None) -> Tuple[GRProcess, LargestProcessWitness]:
    """processOf(ρ), checked to dominate every process with at most enum_bound transitions"""
    witness = largest_fs_process(net, enum_bound, budget)
    largest = process_of(net, witness.rho)
    checked = 0
    for q in enumerate_processes(net, witness.enum_bound):
        if not bd_le(q, largest, net):
            raise ProcNetError("constructed process does not dominate an enumerated process",
                               error_code="LARGEST_CHECK_FAILED")
        checked += 1
    logger.info("Largest BD-process of %s dominates %d enumerated processes", net.name, checked)
    return largest, witness


def pairwise_upper_bound_gap(net: Net, max_len: int) -> Optional[Tuple[Word, Word]]:
    """First pair of firing sequences of length ≤ max_len // 2 with no common ⊑₀∞ upper bound
    among the firing sequences of length ≤ max_len, or None when every pair has one
    """
    words = enumerate_firing_sequences_report(net, max_len).words
    short = [w for w in words if len(w) <= max_len // 2]
    for i, sigma in enumerate(short):
        for sigma_prime in short[i + 1:]:
            if not any(fs_le(net, sigma, w) and fs_le(net, sigma_prime, w) for w in words
                       if len(w) >= max(len(sigma), len(sigma_prime))):
                return sigma, sigma_prime
    return None
