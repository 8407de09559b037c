# Error hierarchy shared by the analysis modules, the CLI and the HTTP service
from typing import Any, Dict, List, Optional
import logging

logger = logging.getLogger(__name__)

# CLI exit codes
EXIT_OK = 0
EXIT_FAILS = 1
EXIT_INPUT_ERROR = 2
EXIT_BOUNDED = 3


class ProcNetError(Exception):
    """Base error with structured information for CLI and API output"""

    error_code = "PROCNET_ERROR"
    exit_code = EXIT_INPUT_ERROR
    status_code = 400

    def __init__(self, message: str, error_code: Optional[str] = None, details: Optional[Dict[str, Any]] = None):
        self.message = message
        if error_code:
            self.error_code = error_code
        self.details = details or {}
        super().__init__(message)

    def to_dict(self) -> Dict[str, Any]:
        payload = {"detail": self.message, "error_code": self.error_code}
        if self.details:
            payload["details"] = self.details
        return payload


class NetValidationError(ProcNetError):
    """A net has overlapping place and transition ids, an empty preset or a dangling arc"""

    error_code = "NET_INVALID"

    def __init__(self, violations: List[str]):
        self.violations = list(violations)
        super().__init__("Invalid net: " + "; ".join(self.violations), details={"violations": self.violations})


class NetParseError(ProcNetError):
    """Syntax error in the net text format"""

    error_code = "NET_PARSE_ERROR"

    def __init__(self, message: str, line: int, column: int = 1):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}", details={"line": line, "column": column})


class UnknownNodeError(ProcNetError):
    error_code = "UNKNOWN_NODE"

    def __init__(self, node: Any):
        self.node = node
        super().__init__(f"Unknown node identifier: {node!r}", details={"node": str(node)})


class NotEnabledError(ProcNetError):
    """Firing a step that is not enabled at the given marking"""

    error_code = "STEP_NOT_ENABLED"


class NotFiringSequenceError(ProcNetError):
    error_code = "NOT_FIRING_SEQUENCE"

    def __init__(self, word, index: int):
        self.word = tuple(word)
        self.index = index
        super().__init__(
            f"{' '.join(self.word) or 'ε'} is not a firing sequence: position {index} is not enabled",
            details={"word": list(self.word), "index": index},
        )


class ProcessValidationError(ProcNetError):
    """A labelled causal net is not a process of the given net"""

    error_code = "PROCESS_INVALID"

    def __init__(self, violations: List[str]):
        self.violations = list(violations)
        super().__init__("Invalid process: " + "; ".join(self.violations), details={"violations": self.violations})


class InvalidSwapError(ProcNetError):
    error_code = "INVALID_SWAP"


class PreconditionError(ProcNetError):
    """A constructive operation was called outside its precondition"""

    error_code = "PRECONDITION_VIOLATED"
    status_code = 422


class ConflictPreconditionError(PreconditionError):
    """The net has a binary conflict; carries the conflict report as witness"""

    error_code = "NET_NOT_BINARY_CONFLICT_FREE"
    exit_code = EXIT_FAILS

    def __init__(self, report):
        self.report = report
        details = {}
        if report is not None and getattr(report, "witnesses", None):
            details["witness"] = report.witnesses[0].model_dump()
        super().__init__("net not binary-conflict-free", details=details)


class SearchBudgetExceeded(ProcNetError):
    """An exhaustive search hit its configured state bound"""

    error_code = "SEARCH_BUDGET_EXCEEDED"
    exit_code = EXIT_BOUNDED
    status_code = 422


class MultisetOverflowError(ProcNetError, OverflowError):
    error_code = "MULTISET_OVERFLOW"
