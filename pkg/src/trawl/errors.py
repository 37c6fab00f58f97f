"""Exception types shared across the package."""


class TrawlError(Exception):
    """Base class for all package errors."""


class GraphParseError(TrawlError):
    """An edge-list line could not be parsed. Carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class EmptyGraphError(TrawlError):
    """The input file contained no edges."""


class NoNeighborsError(TrawlError):
    """A weighted pick was requested for a vertex with no outgoing edges."""


class ContractViolationError(TrawlError):
    """An app callback returned a value that breaks its contract."""


class SamplerStallError(TrawlError):
    """A rejection sampler exceeded its iteration cap."""


class OutputMismatchError(TrawlError):
    """The two execution paradigms produced different outputs."""
