# Command-line surface over the net analyses
import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

from dotenv import load_dotenv
from pydantic import BaseModel, ValidationError

from compat import linearizations, process_of
from conflict import ConflictReport, binary_conflict_free, conflict_free, is_structural_conflict_net
from diamond import largest_bd_witness, largest_fs_process
from net_errors import EXIT_BOUNDED, EXIT_FAILS, EXIT_INPUT_ERROR, EXIT_OK, ProcNetError
from net_io import dump_process, export_dot, load_net, load_process
from net_model import Net, NotFirable, Word, fire_word
from random_nets import RANDOM_NET_CONFIG, random_corpus
from reachability import REACHABILITY_CONFIG, ExplorationBudget, enumerate_firing_sequences_report
from seqequiv import check_word_length, fs_le_witness, seq_star_certificate
from swapping import bd_le, swap_star_certificate
from verify import VerificationReport, VerificationSuite, corpus_exit_code

logger = logging.getLogger(__name__)

EMPTY_WORD = {"", "ε", "-", "eps"}


def parse_word(net: Net, text: str) -> Word:
    """Accept "a b c", "a,b,c" or, when every character names a transition, "abc"."""
    text = text.strip()
    if text in EMPTY_WORD:
        return ()
    parts = [p for p in text.replace(",", " ").split() if p]
    if len(parts) == 1 and not net.is_transition(parts[0]) and all(net.is_transition(c) for c in parts[0]):
        return tuple(parts[0])
    return tuple(parts)


def _w(word: Sequence[str]) -> str:
    return " ".join(word) or "ε"


def _budget(args) -> ExplorationBudget:
    return ExplorationBudget(max_markings=args.marking_budget)


def _emit(args, payload: Any, text: str) -> None:
    if args.json:
        if isinstance(payload, BaseModel):
            print(payload.model_dump_json(indent=2))
        else:
            print(json.dumps(payload, indent=2, ensure_ascii=False))
    else:
        print(text)


def _verdict_exit(verdict: str) -> int:
    if verdict == "fails":
        return EXIT_FAILS
    if verdict.startswith("bounded"):
        return EXIT_BOUNDED
    return EXIT_OK


def _net(args) -> Net:
    if not args.net:
        raise ProcNetError("--net FILE is required for this command", error_code="MISSING_NET")
    return load_net(args.net)


def cmd_validate(args) -> int:
    net = _net(args)
    _emit(args, {"valid": True, "net": net.name, "places": len(net.places), "transitions": len(net.transitions)},
          f"{net.name}: valid ({len(net.places)} places, {len(net.transitions)} transitions)")
    return EXIT_OK


def cmd_fire(args) -> int:
    net = _net(args)
    word = parse_word(net, args.word)
    outcome = fire_word(net, net.initial_marking, word)
    if isinstance(outcome, NotFirable):
        _emit(args, {"firable": False, "failed_at": outcome.index},
              f"{_w(word)} is not firable: position {outcome.index} is not enabled")
        return EXIT_FAILS
    _emit(args, {"firable": True, "marking": outcome.to_dict()}, str(outcome))
    return EXIT_OK


def cmd_enum_fs(args) -> int:
    net = _net(args)
    enumeration = enumerate_firing_sequences_report(net, args.max_len)
    lines = [_w(w) for w in enumeration.words]
    if enumeration.truncated:
        lines.append(f"# longer firing sequences exist beyond length {args.max_len}")
    _emit(args, {"words": [list(w) for w in enumeration.words], "truncated": enumeration.truncated},
          "\n".join(lines))
    return EXIT_OK


def cmd_lin(args) -> int:
    net = _net(args)
    p = load_process(Path(args.process), net)
    words = linearizations(p, net)
    _emit(args, {"linearizations": [list(w) for w in words]}, "\n".join(_w(w) for w in words))
    return EXIT_OK


def cmd_process_of(args) -> int:
    net = _net(args)
    p = process_of(net, parse_word(net, args.word))
    if args.dot:
        Path(args.dot).write_text(export_dot(p), encoding="utf-8")
        logger.info("Wrote process DOT to %s", args.dot)
    print(dump_process(p))
    return EXIT_OK


def _pair_result(args, holds: bool, certificate: Optional[BaseModel], relation: str, left: str, right: str) -> int:
    payload: Dict[str, Any] = {"holds": holds}
    if certificate is not None and args.certificate:
        payload["certificate"] = certificate.model_dump(mode="json")
    text = f"{left} {relation} {right}: {'holds' if holds else 'fails'}"
    if certificate is not None and args.certificate:
        text += "\n" + certificate.model_dump_json(indent=2)
    _emit(args, payload, text)
    return EXIT_OK if holds else EXIT_FAILS


def cmd_equiv_seq(args) -> int:
    net = _net(args)
    sigma, rho = parse_word(net, args.sigma), parse_word(net, args.rho)
    check_word_length(sigma, rho)
    cert = seq_star_certificate(net, sigma, rho)
    return _pair_result(args, cert is not None, cert, "≡₀*", _w(sigma), _w(rho))


def cmd_le_seq(args) -> int:
    net = _net(args)
    sigma, rho = parse_word(net, args.sigma), parse_word(net, args.rho)
    check_word_length(sigma, rho)
    witness = fs_le_witness(net, sigma, rho)
    cert = witness[2] if witness is not None else None
    return _pair_result(args, witness is not None, cert, "⊑₀∞", _w(sigma), _w(rho))


def cmd_equiv_proc(args) -> int:
    net = _net(args)
    p = load_process(Path(args.p), net)
    q = load_process(Path(args.q), net)
    cert = swap_star_certificate(p, q)
    if cert is not None:
        logger.info("Swap certificate has %d moves", len(cert.moves))
    return _pair_result(args, cert is not None, cert, "≡₁*", args.p, args.q)


def cmd_le_proc(args) -> int:
    net = _net(args)
    p = load_process(Path(args.p), net)
    q = load_process(Path(args.q), net)
    return _pair_result(args, bd_le(p, q, net, direct=args.direct), None, "⊑", args.p, args.q)


def _conflict_output(args, report: ConflictReport) -> int:
    lines = [f"{report.property}: {report.verdict} ({report.markings_explored} markings)"]
    for w in report.witnesses[:1] if not args.all_witnesses else report.witnesses:
        lines.append(f"  step {w.step} at {w.marking} after {_w(w.word)}")
    lines.extend(f"  note: {n}" for n in report.notes)
    _emit(args, report, "\n".join(lines))
    return _verdict_exit(report.verdict)


def cmd_conflicts(args) -> int:
    net = _net(args)
    if args.all_sizes:
        report = conflict_free(net, _budget(args), args.mult_cap)
    else:
        report = binary_conflict_free(net, _budget(args))
    return _conflict_output(args, report)


def cmd_structural(args) -> int:
    net = _net(args)
    return _conflict_output(args, is_structural_conflict_net(net, _budget(args)))


def cmd_largest(args) -> int:
    net = _net(args)
    if args.check:
        p, witness = largest_bd_witness(net, args.max_len, _budget(args))
    else:
        witness = largest_fs_process(net, args.max_len, _budget(args))
        p = process_of(net, witness.rho)
    dot = export_dot(p)
    if args.dot:
        Path(args.dot).write_text(dot, encoding="utf-8")
    payload = witness.model_dump(mode="json")
    payload["process_dot"] = dot
    print(json.dumps(payload, indent=2, ensure_ascii=False))
    return EXIT_BOUNDED if witness.truncated and args.strict else EXIT_OK


def _print_report(report: VerificationReport) -> None:
    print(f"{report.net}: {report.verdict}")
    for r in report.results:
        line = f"  {r.name:<32} {r.verdict:<8} {r.checked:>6}"
        if r.counterexample:
            line += f"  {r.counterexample}"
        elif r.detail:
            line += f"  ({r.detail})"
        print(line)


def cmd_verify(args) -> int:
    if args.random:
        nets = random_corpus(args.random, seed=args.seed)
    else:
        nets = [_net(args)]
    reports = [VerificationSuite(net, max_len=args.max_len, budget=_budget(args)).run() for net in nets]
    if args.json:
        print(json.dumps([r.model_dump(mode="json") for r in reports], indent=2, ensure_ascii=False))
    else:
        for report in reports:
            _print_report(report)
    return corpus_exit_code(reports)


def cmd_export_dot(args) -> int:
    net = _net(args)
    obj = load_process(Path(args.process), net) if args.process else net
    dot = export_dot(obj)
    if args.output:
        Path(args.output).write_text(dot, encoding="utf-8")
    else:
        sys.stdout.write(dot)
    return EXIT_OK


def cmd_serve(args) -> int:
    from net_api import serve

    serve(host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--net", help="net file in the procnet text format")
    common.add_argument("--max-len", type=int, default=REACHABILITY_CONFIG['MAX_LEN'],
                        help="bound on word length / enumerated firing sequences")
    common.add_argument("--marking-budget", type=int, default=REACHABILITY_CONFIG['MARKING_BUDGET'],
                        help="maximum number of reachable markings explored")
    common.add_argument("--mult-cap", type=int, default=None, help="cap on transition multiplicity in steps")
    common.add_argument("--certificate", action="store_true", help="print the certificate of a holding relation")
    common.add_argument("--json", action="store_true", help="machine-readable output")

    parser = argparse.ArgumentParser(prog="procnet", description="Process semantics of place/transition nets")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, handler: Callable, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(handler=handler)
        return p

    add("validate", cmd_validate, "parse and validate a net")
    add("fire", cmd_fire, "replay a word from the initial marking").add_argument("word")
    add("enum-fs", cmd_enum_fs, "firing sequences up to --max-len")
    add("lin", cmd_lin, "linearizations of a process").add_argument("process")
    add("process-of", cmd_process_of, "process of a firing sequence").add_argument("word")
    sub.choices["process-of"].add_argument("--dot", help="also write the process as DOT")
    for name, handler, help_text in (("equiv-seq", cmd_equiv_seq, "σ ≡₀* ρ"),
                                     ("le-seq", cmd_le_seq, "σ ⊑₀∞ ρ")):
        p = add(name, handler, help_text)
        p.add_argument("sigma")
        p.add_argument("rho")
    for name, handler, help_text in (("equiv-proc", cmd_equiv_proc, "P ≡₁* Q"),
                                     ("le-proc", cmd_le_proc, "[P] ⊑ [Q] on BD-processes")):
        p = add(name, handler, help_text)
        p.add_argument("p")
        p.add_argument("q")
    sub.choices["le-proc"].add_argument("--direct", action="store_true",
                                        help="search swap classes instead of going through linearizations")
    for name, handler, help_text in (("conflicts", cmd_conflicts, "binary (or any-size) conflict freeness"),
                                     ("structural", cmd_structural, "structural conflict net check")):
        p = add(name, handler, help_text)
        p.add_argument("--all-witnesses", action="store_true")
    sub.choices["conflicts"].add_argument("--all-sizes", action="store_true",
                                          help="check conflicts of every size, not only pairs")
    p = add("largest", cmd_largest, "largest process of a binary-conflict-free net")
    p.add_argument("--dot", help="write the largest process as DOT")
    p.add_argument("--check", action="store_true", help="check it dominates every enumerated process")
    p.add_argument("--strict", action="store_true", help="exit 3 when longer firing sequences were left out")
    p = add("verify", cmd_verify, "run the property checks on a net or a random corpus")
    p.add_argument("--random", type=int, default=0, metavar="N", help="verify N random nets instead of --net")
    p.add_argument("--seed", type=int, default=None, help=f"corpus seed (default {RANDOM_NET_CONFIG['SEED']})")
    p.set_defaults(max_len=None)
    p = add("export-dot", cmd_export_dot, "render a net, or a process of it, as Graphviz DOT")
    p.add_argument("process", nargs="?")
    p.add_argument("-o", "--output")
    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=None)
    p.set_defaults(handler=cmd_serve)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    logging.basicConfig(level=os.getenv('PROCNET_LOG_LEVEL', 'WARNING'),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ProcNetError as e:
        logger.debug("Command %s failed with %s", args.command, e.error_code)
        print(f"error: {e.message}", file=sys.stderr)
        return e.exit_code
    except ValidationError as e:
        print(f"error: invalid data: {e.errors()[0]['msg']}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except Exception as e:
        logger.error("Unexpected error in %s: %s", args.command, str(e), exc_info=True)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
