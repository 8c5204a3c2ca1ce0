"""Exception hierarchy shared across the package."""


class CorrColorError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(CorrColorError):
    """Input is well-formed but outside an operation's domain."""


class MalformedInputError(CorrColorError):
    """Input file or document violates the expected schema."""


class SearchBudgetExceeded(CorrColorError):
    """Exact search gave up after exploring its node budget.

    Distinct from "no coloring exists": the search was cut short.
    """

    def __init__(self, nodes_explored: int, budget: int):
        super().__init__(
            f"search budget exhausted: {nodes_explored} nodes explored (budget {budget})"
        )
        self.nodes_explored = nodes_explored
        self.budget = budget


class IstarInfeasibleError(DomainError):
    """No iteration count satisfies the degree-decay inequality for this max degree."""


class HypothesisViolationError(DomainError):
    """A stated bound hypothesis (mass range or edge-mass cap) does not hold."""


class InternalConsistencyError(CorrColorError):
    """An invariant that honest inputs cannot break was violated; indicates a bug."""
