# Net text format, process JSON interchange and DOT export
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Tuple, Union
import logging
import re

from pydantic import ValidationError

from net_errors import NetParseError, NetValidationError, ProcessValidationError
from net_model import Net, TransitionSpec, validate
from process_model import GRProcess, check_process

logger = logging.getLogger(__name__)

KEYWORDS = {"net", "place", "trans", "tokens", "in", "out"}
_TOKEN = re.compile(r"\S+")
_IDENT = re.compile(r"[A-Za-z0-9_.'\-]+")
_COUNT = re.compile(r"\d+")


def _tokens(line: str) -> List[Tuple[str, int]]:
    # strip comments, keep 1-based columns
    code = line.split("#", 1)[0]
    return [(m.group(0), m.start() + 1) for m in _TOKEN.finditer(code)]


def _ident(token: str, line: int, column: int, what: str) -> str:
    if not _IDENT.fullmatch(token) or token in KEYWORDS:
        raise NetParseError(f"invalid {what} identifier {token!r}", line, column)
    return token


def _count(token: str, line: int, column: int, what: str, positive: bool = False) -> int:
    if not _COUNT.fullmatch(token):
        raise NetParseError(f"{what} must be a nonnegative integer, got {token!r}", line, column)
    value = int(token)
    if positive and value == 0:
        raise NetParseError(f"{what} must be positive", line, column)
    return value


def _arc(token: str, line: int, column: int) -> Tuple[str, int]:
    place, sep, weight = token.partition(":")
    place = _ident(place, line, column, "place")
    if not sep:
        return place, 1
    return place, _count(weight, line, column + len(place) + 1, "arc weight", positive=True)


def parse_net(text: str, name: Optional[str] = None) -> Net:
    """Parse the line-oriented net format; syntax errors carry line and column"""
    net_name = name
    places: Dict[str, int] = {}
    transitions: Dict[str, TransitionSpec] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = _tokens(raw)
        if not toks:
            continue
        keyword, col = toks[0]
        if keyword == "net":
            if len(toks) != 2:
                raise NetParseError("expected 'net NAME'", lineno, col)
            net_name = toks[1][0]
        elif keyword == "place":
            if len(toks) not in (2, 4):
                raise NetParseError("expected 'place ID [tokens N]'", lineno, col)
            ident = _ident(toks[1][0], lineno, toks[1][1], "place")
            if ident in places:
                raise NetParseError(f"duplicate place {ident}", lineno, toks[1][1])
            tokens = 0
            if len(toks) == 4:
                if toks[2][0] != "tokens":
                    raise NetParseError(f"expected 'tokens', got {toks[2][0]!r}", lineno, toks[2][1])
                tokens = _count(toks[3][0], lineno, toks[3][1], "token count")
            places[ident] = tokens
        elif keyword == "trans":
            if len(toks) < 2:
                raise NetParseError("expected 'trans ID in ARCS out ARCS'", lineno, col)
            ident = _ident(toks[1][0], lineno, toks[1][1], "transition")
            if ident in transitions:
                raise NetParseError(f"duplicate transition {ident}", lineno, toks[1][1])
            arcs: Dict[str, Dict[str, int]] = {"in": {}, "out": {}}
            section = None
            for tok, tcol in toks[2:]:
                if tok in ("in", "out"):
                    if section == "out" or (section == "in" and tok == "in") or arcs[tok]:
                        raise NetParseError(f"unexpected {tok!r}", lineno, tcol)
                    section = tok
                    continue
                if section is None:
                    raise NetParseError(f"expected 'in' or 'out' before {tok!r}", lineno, tcol)
                place, weight = _arc(tok, lineno, tcol)
                if place in arcs[section]:
                    raise NetParseError(f"duplicate arc {place} in transition {ident}", lineno, tcol)
                arcs[section][place] = weight
            transitions[ident] = TransitionSpec(inputs=arcs["in"], outputs=arcs["out"])
        else:
            raise NetParseError(f"unknown declaration {keyword!r}", lineno, col)

    try:
        net = Net(name=net_name or "net", places=places, transitions=transitions)
    except ValidationError as e:
        raise NetParseError(str(e.errors()[0]["msg"]), 1) from e
    violations = validate(net)
    if violations:
        raise NetValidationError(violations)
    logger.debug("Parsed net %s: %d places, %d transitions", net.name, len(places), len(transitions))
    return net


def _arc_list(arcs: Dict[str, int]) -> str:
    return " ".join(p if w == 1 else f"{p}:{w}" for p, w in sorted(arcs.items()) if w > 0)


def print_net(net: Net) -> str:
    """Serialize in the text format; parse_net(print_net(n)) == n"""
    lines = [f"net {net.name}"]
    for s in net.place_ids:
        tokens = net.places[s]
        lines.append(f"place {s} tokens {tokens}" if tokens else f"place {s}")
    for t in net.transition_ids:
        spec = net.transitions[t]
        line = f"trans {t} in {_arc_list(spec.inputs)}"
        outputs = _arc_list(spec.outputs)
        lines.append(f"{line} out {outputs}" if outputs else line)
    return "\n".join(lines) + "\n"


def load_net(path: Union[str, Path]) -> Net:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise NetParseError(f"cannot read {path}: {e.strerror}", 0, 0) from e
    return parse_net(text, name=path.stem)


def dump_process(p: GRProcess) -> str:
    return p.to_json()


def load_process(source: Union[str, Path], net: Optional[Net] = None) -> GRProcess:
    """Read a process from a JSON file path or JSON text, checked against net when given"""
    if isinstance(source, Path) or not source.lstrip().startswith("{"):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source
    try:
        p = GRProcess.from_json(text)
    except (ValueError, ValidationError) as e:
        raise ProcessValidationError([f"malformed process JSON: {e}"]) from e
    if net is not None:
        check_process(p, net)
    return p


def _gvquote(s: str) -> str:
    return '"{}"'.format(str(s).replace('"', r'\"'))


def _net_dot(net: Net) -> Iterator[str]:
    yield f"digraph {_gvquote(net.name)} {{"
    yield "  rankdir=LR;"
    for s in net.place_ids:
        tokens = net.places[s]
        label = f"{s}\\n{tokens}" if tokens else s
        yield f"  {_gvquote('s:' + s)} [shape=circle label={_gvquote(label)}];"
    for t in net.transition_ids:
        yield f"  {_gvquote('t:' + t)} [shape=box label={_gvquote(t)}];"
    for t in net.transition_ids:
        spec = net.transitions[t]
        for s, w in sorted(spec.inputs.items()):
            if w:
                yield f"  {_gvquote('s:' + s)} -> {_gvquote('t:' + t)} [label=\"{w}\"];"
        for s, w in sorted(spec.outputs.items()):
            if w:
                yield f"  {_gvquote('t:' + t)} -> {_gvquote('s:' + s)} [label=\"{w}\"];"
    yield "}"


def _process_dot(p: GRProcess) -> Iterator[str]:
    yield "digraph process {"
    yield "  rankdir=TB;"
    for s in sorted(p.places):
        style = " style=bold" if s in p.initial_cut else ""
        yield f"  n{s} [shape=circle label={_gvquote(f'{s}: {p.places[s]}')}{style}];"
    for t in sorted(p.transitions):
        yield f"  n{t} [shape=box label={_gvquote(f'{t}: {p.transitions[t]}')}];"
    for x, y in sorted(p.arcs):
        yield f"  n{x} -> n{y} [label=\"1\"];"
    yield "}"


def export_dot(obj: Union[Net, GRProcess]) -> str:
    """Graphviz rendering: circles for places, boxes for transitions, weighted edges"""
    lines = _net_dot(obj) if isinstance(obj, Net) else _process_dot(obj)
    return "\n".join(lines) + "\n"
