# Executable property checks over one net, bundled as a verification report
from collections import defaultdict
from itertools import combinations, combinations_with_replacement, product
from typing import Callable, Dict, List, Literal, Optional
import logging
import os

from pydantic import BaseModel, Field

from compat import (
    compatible,
    extend_process_along,
    linearizations,
    linearize_extension,
    match_prefix_down,
    process_of,
    process_prefix_for,
    some_linearization,
)
from conflict import binary_conflict_free, conflict_free, is_structural_conflict_net
from diamond import check_cover, largest_fs_process
from net_errors import (
    EXIT_BOUNDED,
    EXIT_FAILS,
    EXIT_OK,
    ProcNetError,
    SearchBudgetExceeded,
)
from net_model import Net, fire, reach
from process_model import (
    causal_prefixes,
    end_marking,
    enumerate_processes,
    is_prefix,
    label_multiset,
    validate_process,
)
from reachability import ExplorationBudget, enumerate_firing_sequences, reachable_markings
from seqequiv import fs_equiv, fs_le, localize_swaps, reorder_after_prefix, seq_class, seq_star_equiv
from swapping import bd_le_direct, swap_star_equiv

logger = logging.getLogger(__name__)

VERIFY_CONFIG = {
    'MAX_LEN': int(os.getenv('PROCNET_VERIFY_MAX_LEN', '4')),
    'MAX_PROCESS_TRANSITIONS': int(os.getenv('PROCNET_VERIFY_MAX_TRANSITIONS', '3')),
    'MAX_PAIRS': int(os.getenv('PROCNET_VERIFY_MAX_PAIRS', '400')),
    'MARKING_SAMPLE': 12,
}

CheckVerdict = Literal["holds", "fails", "skipped", "bounded"]


class CheckResult(BaseModel):
    name: str
    verdict: CheckVerdict
    checked: int = 0
    counterexample: Optional[str] = None
    detail: str = ""


class VerificationReport(BaseModel):
    net: str
    results: List[CheckResult] = Field(default_factory=list)

    @property
    def verdict(self) -> str:
        verdicts = {r.verdict for r in self.results}
        if "fails" in verdicts:
            return "fails"
        if "bounded" in verdicts:
            return "bounded"
        return "holds"

    @property
    def exit_code(self) -> int:
        return {"fails": EXIT_FAILS, "bounded": EXIT_BOUNDED}.get(self.verdict, EXIT_OK)


class _Counterexample(Exception):
    pass


class _Skip(Exception):
    pass


def _expect(condition: bool, message: str) -> None:
    if not condition:
        raise _Counterexample(message)


def _w(word) -> str:
    return " ".join(word) or "ε"


class VerificationSuite:
    """Runs every property check against one net within fixed bounds"""

    def __init__(self, net: Net, max_len: Optional[int] = None, max_transitions: Optional[int] = None,
                 budget: Optional[ExplorationBudget] = None, enum_bound: Optional[int] = None):
        self.net = net
        self.config = VERIFY_CONFIG
        self.max_len = max_len if max_len is not None else self.config['MAX_LEN']
        self.max_transitions = max_transitions if max_transitions is not None else self.config['MAX_PROCESS_TRANSITIONS']
        self.budget = budget
        self.enum_bound = enum_bound if enum_bound is not None else self.max_len
        self._words = None
        self._processes = None
        self._truncated: Optional[str] = None
        logger.info("Verification suite initialized for %s (max_len=%d)", net.name, self.max_len)

    @property
    def words(self):
        if self._words is None:
            self._words = enumerate_firing_sequences(self.net, self.max_len)
        return self._words

    @property
    def processes(self):
        if self._processes is None:
            self._processes = enumerate_processes(self.net, self.max_transitions)
        return self._processes

    def checks(self) -> Dict[str, Callable[[], int]]:
        return {
            "multiset-laws": self._multiset_laws,
            "firing-determinism": self._firing_determinism,
            "process-round-trip": self._process_round_trip,
            "swap-vs-sequence-equivalence": self._swap_sequence_bijection,
            "process-vs-sequence-order": self._order_bijection,
            "sequence-preorder": self._sequence_preorder,
            "reordering-contracts": self._reordering_contracts,
            "prefix-matching-contracts": self._prefix_matching_contracts,
            "structural-conflict-class": self._structural_class_fact,
            "largest-process": self._largest_process,
        }

    def run(self) -> VerificationReport:
        report = VerificationReport(net=self.net.name)
        for name, check in self.checks().items():
            report.results.append(self._run_one(name, check))
        logger.info("Verification of %s finished: %s", self.net.name, report.verdict)
        return report

    def _run_one(self, name: str, check: Callable[[], int]) -> CheckResult:
        self._truncated = None
        try:
            checked = check()
        except _Skip as e:
            return CheckResult(name=name, verdict="skipped", detail=str(e))
        except _Counterexample as e:
            logger.warning("Check %s failed on %s: %s", name, self.net.name, e)
            return CheckResult(name=name, verdict="fails", counterexample=str(e))
        except SearchBudgetExceeded as e:
            logger.warning("Check %s hit a search bound on %s: %s", name, self.net.name, e)
            return CheckResult(name=name, verdict="bounded", detail=e.message)
        except ProcNetError as e:
            logger.error("Check %s raised on %s: %s", name, self.net.name, e, exc_info=True)
            return CheckResult(name=name, verdict="fails", counterexample=e.message)
        if self._truncated is not None:
            logger.warning("Check %s on %s %s", name, self.net.name, self._truncated)
            return CheckResult(name=name, verdict="bounded", checked=checked, detail=self._truncated)
        return CheckResult(name=name, verdict="holds", checked=checked)

    # individual checks; each returns the number of instances checked

    def _multiset_laws(self) -> int:
        markings = reachable_markings(self.net, self.budget).markings[: self.config['MARKING_SAMPLE']]
        count = 0
        for a in markings:
            for b in markings:
                _expect(a.sum(b).difference(b) == a, f"(a + b) - b != a for a={a}, b={b}")
                _expect(a.sum(b).cardinality == a.cardinality + b.cardinality, f"|a + b| mismatch for {a}, {b}")
                _expect(a.union(b) == b.union(a) and a.intersection(b) == b.intersection(a),
                        f"union/intersection not commutative on {a}, {b}")
                _expect(a.union(a) == a and a.intersection(a) == a, f"union/intersection not idempotent on {a}")
                for pi in (lambda _: "x", lambda s: s[:1]):
                    _expect(a.sum(b).image(pi) == a.image(pi).sum(b.image(pi)),
                            f"image does not distribute over sum on {a}, {b}")
                    _expect(a.image(pi).cardinality == a.cardinality, f"image changes the size of {a}")
                count += 1
        return count

    def _firing_determinism(self) -> int:
        known = set(self.words)
        for word in self.words:
            if word:
                _expect(word[:-1] in known, f"firing sequences not prefix closed at {_w(word)}")
                _expect(reach(self.net, word) == fire(self.net, reach(self.net, word[:-1]), word[-1]),
                        f"reached marking depends on the route for {_w(word)}")
        return len(self.words)

    def _process_round_trip(self) -> int:
        for word in self.words:
            p = process_of(self.net, word)
            _expect(not validate_process(p, self.net), f"processOf({_w(word)}) is not a process")
            _expect(compatible(p, word) is not None, f"{_w(word)} is not compatible with its process")
            _expect(word in linearizations(p, self.net), f"{_w(word)} missing from Lin(processOf)")
            _expect(end_marking(p) == reach(self.net, word), f"end marking differs for {_w(word)}")
        return len(self.words)

    def _grouped_processes(self):
        groups = defaultdict(list)
        for p in self.processes:
            groups[label_multiset(p)].append(p)
        return groups

    def _pairs(self, pairs):
        """At most MAX_PAIRS of the given pairs; stopping early marks the running check bounded"""
        limit = self.config['MAX_PAIRS']
        for n, pair in enumerate(pairs):
            if n >= limit:
                self._truncated = f"stopped after {limit} pairs"
                return
            yield pair

    def _swap_sequence_bijection(self) -> int:
        count = 0
        classes: Dict[tuple, set] = {}
        pairs = (pair for group in self._grouped_processes().values()
                 for pair in combinations_with_replacement([(p, linearizations(p, self.net)) for p in group], 2))
        for (p, p_lins), (q, q_lins) in self._pairs(pairs):
            expected = swap_star_equiv(p, q)
            for sigma in p_lins:
                if sigma not in classes:
                    classes[sigma] = set(seq_class(self.net, sigma))
                for rho in q_lins:
                    _expect((rho in classes[sigma]) == expected,
                            f"≡₁* and ≡₀* disagree on {_w(sigma)} / {_w(rho)}")
                    count += 1
        return count

    def _order_bijection(self) -> int:
        count = 0
        processes = self.processes
        lins = {id(p): some_linearization(p, self.net) for p in processes}
        for p, q in self._pairs(product(processes, repeat=2)):
            expected = fs_le(self.net, lins[id(p)], lins[id(q)])
            _expect(bd_le_direct(p, q, self.net) == expected,
                    f"⊑ on processes disagrees with ⊑₀∞ on {_w(lins[id(p)])} / {_w(lins[id(q)])}")
            count += 1
        return count

    def _sequence_preorder(self) -> int:
        words = self.words
        count = 0
        for a in words:
            _expect(fs_le(self.net, a, a), f"⊑₀∞ not reflexive at {_w(a)}")
        for a, b in self._pairs(combinations(words, 2)):
            _expect(fs_equiv(self.net, a, b) == seq_star_equiv(self.net, a, b),
                    f"kernel of ⊑₀∞ differs from ≡₀* on {_w(a)} / {_w(b)}")
            count += 1
        le = {(a, b) for a in words for b in words if len(a) <= len(b) and fs_le(self.net, a, b)}
        for a, b in le:
            for c in words:
                if (b, c) in le:
                    _expect((a, c) in le, f"⊑₀∞ not transitive on {_w(a)}, {_w(b)}, {_w(c)}")
                    count += 1
        return count + len(words)

    def _reordering_contracts(self) -> int:
        count = 0
        for sigma3 in self.words:
            for k in range(len(sigma3) + 1):
                sigma2 = sigma3[:k]
                for sigma1 in seq_class(self.net, sigma2):
                    sigma4 = reorder_after_prefix(self.net, sigma1, sigma2, sigma3)
                    _expect(sigma4[: len(sigma1)] == sigma1 and seq_star_equiv(self.net, sigma4, sigma3),
                            f"prefix reordering failed for {_w(sigma1)}, {_w(sigma2)}, {_w(sigma3)}")
                    count += 1
            for rho in seq_class(self.net, sigma3):
                for k in range(len(sigma3) + 1):
                    left, right = localize_swaps(self.net, sigma3[:k], sigma3, rho)
                    _expect(left[:k] == sigma3[:k] and rho[: len(right)] == right
                            and seq_star_equiv(self.net, left, right),
                            f"swap localization failed for {_w(sigma3)} / {_w(rho)}")
                    count += 1
        return count

    def _prefix_matching_contracts(self) -> int:
        count = 0
        for p in self.processes:
            lins = linearizations(p, self.net)
            for sigma in lins:
                for k in range(len(sigma) + 1):
                    q = process_prefix_for(p, sigma, sigma[:k], self.net)
                    _expect(is_prefix(q, p) and compatible(q, sigma[:k]) is not None,
                            f"prefix process for {_w(sigma[:k])} is wrong")
                    grown = extend_process_along(q, sigma[:k], sigma, self.net)
                    _expect(not validate_process(grown, self.net) and is_prefix(q, grown)
                            and compatible(grown, sigma) is not None,
                            f"extension along {_w(sigma)} is wrong")
                    count += 1
                for prefix in causal_prefixes(p):
                    small, sigma1, sigma2 = match_prefix_down(prefix, p, sigma, self.net)
                    _expect(compatible(prefix, small) is not None and sigma1[: len(small)] == small
                            and sigma[: len(sigma2)] == sigma2 and seq_star_equiv(self.net, sigma1, sigma2),
                            f"prefix matching failed for {_w(sigma)}")
                    extended = linearize_extension(prefix, p, small, self.net)
                    _expect(extended[: len(small)] == small and compatible(p, extended) is not None,
                            f"extension linearization failed for {_w(small)}")
                    count += 1
        return count

    def _structural_class_fact(self) -> int:
        structural = is_structural_conflict_net(self.net, self.budget)
        if structural.verdict == "fails":
            raise _Skip("not a structural conflict net")
        binary = binary_conflict_free(self.net, self.budget)
        full = conflict_free(self.net, self.budget)
        _expect((binary.verdict == "fails") == (full.verdict == "fails"),
                f"conflict-free ({full.verdict}) and binary-conflict-free ({binary.verdict}) disagree")
        if not binary.exhaustive:
            raise SearchBudgetExceeded("reachable markings were truncated")
        return binary.markings_explored

    def _largest_process(self) -> int:
        if binary_conflict_free(self.net, self.budget).verdict == "fails":
            raise _Skip("net has a binary conflict")
        witness = largest_fs_process(self.net, self.enum_bound, self.budget)
        for cover in witness.covers:
            _expect(check_cover(self.net, witness, cover),
                    f"cover of {_w(cover.sigma)} does not replay")
        return len(witness.covers)


def verify_corpus(nets: List[Net], **bounds) -> List[VerificationReport]:
    reports = [VerificationSuite(net, **bounds).run() for net in nets]
    failed = sum(1 for r in reports if r.verdict == "fails")
    logger.info("Verified %d nets, %d with failing checks", len(reports), failed)
    return reports


def corpus_exit_code(reports: List[VerificationReport]) -> int:
    verdicts = {r.verdict for r in reports}
    if "fails" in verdicts:
        return EXIT_FAILS
    if "bounded" in verdicts:
        return EXIT_BOUNDED
    return EXIT_OK

