"""
This module provides the exception types raised across the preservers toolkit.

Library code raises these; the `controller` catches them, logs them and maps them to exit codes.
Input problems derive from `ValueError`, resource and invariant problems from `RuntimeError`.
"""


class GraphError(ValueError):
    """Base class for invalid graphs, subgraphs, paths and vertex orders."""


class GraphFormatError(GraphError):
    """
    A graph or pair file could not be parsed.

    Attributes:
        - `line_number` (int | None): 1-based line of the offending entry, if known.
    """

    def __init__(self, message: str, line_number: int | None = None) -> None:
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class NotASubgraphError(GraphError):
    """A subgraph does not share the parent graph or is not contained in it."""


class NotStronglyConnectedError(GraphError):
    """A vertex set expected to be strongly connected is not."""


class PathConcatError(GraphError):
    """Two paths whose endpoints do not meet were concatenated."""


class InvalidOrderError(GraphError):
    """An ordered vertex list is not a permutation of the vertex set."""


class DecompositionError(GraphError):
    """A pair preserver cannot be expressed as the union of two s-t paths."""


class InfeasibleGraphError(GraphError):
    """A random graph with the requested parameters does not exist."""


class PreconditionError(ValueError):
    """An operation was called on input violating its documented precondition."""


class EnumerationBudgetError(RuntimeError):
    """
    Exhaustive failure enumeration would exceed the configured cap.

    Attributes:
        - `required` (int): Number of failure sets the enumeration needs.
        - `cap` (int): The configured enumeration cap.
    """

    def __init__(self, required: int, cap: int) -> None:
        self.required = required
        self.cap = cap
        super().__init__(
            f"Exhaustive verification needs {required} failure sets, above the cap of {cap}"
        )

    def __reduce__(self):
        return type(self), (self.required, self.cap)


class InvariantViolationError(RuntimeError):
    """A construction broke one of its hard structural guarantees."""


class VerificationFailedError(RuntimeError):
    """
    A builder's self-certification failed.

    Attributes:
        - `report`: The failing `VerificationReport`.
    """

    def __init__(self, message: str, report=None) -> None:
        self.report = report
        super().__init__(message)

    def __reduce__(self):
        return type(self), (str(self), self.report)
