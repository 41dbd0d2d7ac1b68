"""Exception types shared across the toolkit."""

from __future__ import annotations


class SparsekitError(Exception):
    """Base class for all toolkit errors."""


class InvalidGraphError(SparsekitError):
    """Malformed graph input (self-loop, duplicate edge, bad weight, ...)."""


class InvalidClusteringError(SparsekitError):
    """Clustering violates its invariants (overlap, broken tree, ...)."""


class ParameterError(SparsekitError):
    """An operation was called with out-of-range parameters."""


class ConfigurationError(SparsekitError):
    """A tunable constant is too small for the requested guarantee."""


class InvariantViolation(SparsekitError):
    """A runtime-checked algorithm invariant failed.

    These checks are part of the deliverable: they turn proof obligations
    into executable assertions and are kept on in production code paths.
    """


class BudgetViolationError(SparsekitError):
    """A simulated node sent a message above the per-edge bit budget."""

    def __init__(self, node: int, round_no: int, bits: int, budget: int):
        super().__init__(
            f"node {node} sent a {bits}-bit message in round {round_no}"
            f" (budget {budget} bits)"
        )
        self.node = node
        self.round_no = round_no
        self.bits = bits
        self.budget = budget


class SimulationTimeout(SparsekitError):
    """The simulation hit max_rounds with nodes still running."""

    def __init__(self, max_rounds: int, running: int):
        super().__init__(
            f"{running} node(s) still running after {max_rounds} rounds"
        )
        self.max_rounds = max_rounds
        self.running = running
