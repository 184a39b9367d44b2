"""Exceptions raised by the query engine.

Every error a caller can act on derives from `CfpqError`, so the command-line
frontend can map the whole family to an input-error exit status at one place.
"""


class CfpqError(Exception):
    """Base class for all engine errors."""


class GrammarSyntaxError(CfpqError):
    """A grammar document could not be parsed.

    Attributes:
        line (int): 1-based line number of the offending rule.
    """

    def __init__(self, message: str, line: int) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


class SymbolConflictError(CfpqError):
    """The same token is used both as a terminal and as a nonterminal."""


class EpsilonLanguageError(CfpqError):
    """A queried nonterminal derives nothing but the empty string."""


class UnknownNonterminalError(CfpqError, KeyError):
    """A nonterminal name is not declared by the grammar."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class GraphFormatError(CfpqError):
    """A graph document could not be parsed.

    Attributes:
        line (int): 1-based line number of the malformed entry, 0 for structural errors.
    """

    def __init__(self, message: str, line: int = 0) -> None:
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


class UnknownNodeError(CfpqError, KeyError):
    """A node id is not part of the graph."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class NoPathError(CfpqError):
    """No path between the requested nodes matches the query."""


class NotDerivableError(CfpqError):
    """A string or path cannot be derived from the requested (annotated) nonterminal."""
