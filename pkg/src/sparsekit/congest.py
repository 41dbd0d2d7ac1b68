"""Synchronous message-passing simulator with per-edge bit budgets.

The model: nodes run in lockstep rounds.  In each round every running
node consumes the messages sent to it in the previous round and emits at
most one message per incident edge; a message is a `bytes` object whose
size in bits must stay within the budget (default ceil(64 * log2 n)
bits, covering ids-plus-weights payloads with room to spare).  Delivery
is reliable and takes exactly one round; there are no failures.

A program first runs `init` with its local view (no inbox); `init` may
already send and may halt.  `rounds_used` counts executed message
rounds, so a program that halts in `init` uses 0 rounds.  Nodes are
stepped in id order but cannot observe that order — all round-t
messages are delivered together at round t+1 — so any parallel
execution of a round is equivalent.

Randomness: one global seed; each node derives an independent-looking
stream as sha256(seed, node, round) via `derive_randomness` /
`derived_coin`, which keeps runs reproducible bit-for-bit.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Protocol

from .clustering import ClusterGraph, Clustering, contract
from .errors import BudgetViolationError, ParameterError, SimulationTimeout
from .graph import Graph
from .rational import ceil_log2


def default_budget_bits(n: int) -> int:
    """ceil(64 * log2 n) bits, computed exactly."""
    if n < 2:
        return 64
    return ceil_log2(n**64)


def derive_randomness(seed: int, node: int, round_no: int, salt: bytes = b"") -> int:
    """256-bit pseudo-random integer, deterministic in all arguments."""
    h = hashlib.sha256()
    h.update(salt)
    for x in (seed, node, round_no):
        h.update(int(x).to_bytes(16, "little", signed=True))
    return int.from_bytes(h.digest(), "little")


def derived_coin(seed: int, node: int, round_no: int, p: Fraction, salt: bytes = b"") -> bool:
    """Bernoulli(p) coin from the derived stream; exact for rational p."""
    h = derive_randomness(seed, node, round_no, salt) >> 128  # 128 uniform bits
    return h * p.denominator < p.numerator << 128


def pack_bits(value: int, bits: int) -> bytes:
    """Encode a nonnegative integer into ceil(bits/8) bytes."""
    if value < 0 or (bits and value >> bits):
        raise ValueError(f"value {value} does not fit in {bits} bits")
    return value.to_bytes(max(1, (bits + 7) // 8), "little")


def unpack_bits(data: bytes) -> int:
    return int.from_bytes(data, "little")


@dataclass(frozen=True)
class LocalView:
    """What a node is allowed to see at start-up."""

    node: int
    n: int
    incident: tuple[tuple[int, int, int], ...]  # (edge_id, neighbor, weight)


@dataclass(frozen=True)
class Halt:
    """Returned by a program step to stop this node with a final output."""

    output: Any = None


class NodeProgram(Protocol):
    """Behavioral interface for simulated nodes.

    Outputs must depend only on the node id, its local view, the shared
    seed, and received messages (locality); the simulator's causality
    tests exercise exactly this property.
    """

    def init(self, view: LocalView, seed: int) -> tuple[Any, dict[int, bytes], Halt | None]:
        ...

    def step(
        self, state: Any, view: LocalView, round_no: int, inbox: dict[int, bytes]
    ) -> tuple[Any, dict[int, bytes], Halt | None]:
        ...


@dataclass
class RoundTrace:
    rounds_used: int
    max_message_bits: int
    per_round_messages: list[int]
    outputs: dict[int, Any]
    logical_rounds: int = 0
    physical_rounds: int = 0

    def __post_init__(self):
        if self.logical_rounds == 0:
            self.logical_rounds = self.rounds_used
        if self.physical_rounds == 0:
            self.physical_rounds = self.rounds_used

    def to_json(self) -> str:
        def enc(x: Any) -> Any:
            if isinstance(x, (frozenset, set, tuple)):
                return sorted(x) if isinstance(x, (frozenset, set)) else list(x)
            return x

        payload = {
            "rounds": self.rounds_used,
            "logical_rounds": self.logical_rounds,
            "physical_rounds": self.physical_rounds,
            "max_message_bits": self.max_message_bits,
            "per_round": self.per_round_messages,
            "outputs": {str(k): enc(v) for k, v in sorted(self.outputs.items())},
        }
        return json.dumps(payload, sort_keys=True)


def run(
    graph: Graph,
    program: NodeProgram,
    *,
    budget_bits: int | None = None,
    max_rounds: int | None = None,
    seed: int = 0,
) -> RoundTrace:
    """Execute `program` on every node of `graph` until all halt.

    Deterministic given (graph, program, seed): nodes are stepped in id
    order each round, and all messages sent in round t are delivered in
    round t+1.  Raises BudgetViolationError when a message exceeds the
    bit budget and SimulationTimeout when max_rounds passes with running
    nodes.
    """
    budget = default_budget_bits(graph.n) if budget_bits is None else budget_bits
    if budget < 1:
        raise ParameterError("budget_bits must be >= 1")
    limit = max_rounds if max_rounds is not None else max(16, 10 * graph.n)

    views = [
        LocalView(v, graph.n, tuple((eid, graph.edges[eid].other(v), graph.edges[eid].w) for eid in graph.adj[v]))
        for v in range(graph.n)
    ]
    neighbor_sets = [frozenset(nb for _, nb, _ in views[v].incident) for v in range(graph.n)]

    states: dict[int, Any] = {}
    outputs: dict[int, Any] = {}
    running: set[int] = set()
    max_bits = 0
    per_round: list[int] = []
    pending: dict[int, dict[int, bytes]] = {v: {} for v in range(graph.n)}

    def post(sender: int, outbox: dict[int, bytes], round_no: int, nxt: dict[int, dict[int, bytes]]):
        nonlocal max_bits
        for dst in sorted(outbox):
            msg = outbox[dst]
            if dst not in neighbor_sets[sender]:
                raise ParameterError(f"node {sender} sent to non-neighbor {dst}")
            if not isinstance(msg, (bytes, bytearray)):
                raise ParameterError(f"node {sender} sent a non-bytes message")
            bits = len(msg) * 8
            if bits > budget:
                raise BudgetViolationError(sender, round_no, bits, budget)
            max_bits = max(max_bits, bits)
            nxt[dst][sender] = bytes(msg)

    # Round 0: init (no inbox).
    nxt: dict[int, dict[int, bytes]] = {v: {} for v in range(graph.n)}
    count0 = 0
    for v in range(graph.n):
        state, outbox, halt = program.init(views[v], seed)
        count0 += len(outbox)
        post(v, outbox, 0, nxt)
        if halt is not None:
            outputs[v] = halt.output
        else:
            states[v] = state
            running.add(v)
    pending = nxt
    per_round.append(count0)  # messages sent during init

    rounds = 0
    while running:
        if rounds >= limit:
            raise SimulationTimeout(limit, len(running))
        rounds += 1
        nxt = {v: {} for v in range(graph.n)}
        count_sent = 0
        for v in sorted(running):
            # Inboxes are assembled in ascending sender order.
            inbox = {s: pending[v][s] for s in sorted(pending[v])}
            state, outbox, halt = program.step(states[v], views[v], rounds, inbox)
            count_sent += len(outbox)
            post(v, outbox, rounds, nxt)
            if halt is not None:
                outputs[v] = halt.output
                del states[v]
                running.discard(v)
            else:
                states[v] = state
        pending = nxt
        per_round.append(count_sent)

    return RoundTrace(rounds, max_bits, per_round, outputs)


def run_on_cluster_graph(
    graph: Graph,
    clustering: Clustering,
    program: NodeProgram,
    *,
    budget_bits: int | None = None,
    max_rounds: int | None = None,
    seed: int = 0,
) -> tuple[RoundTrace, ClusterGraph]:
    """Run a program treating each cluster as one logical node.

    Communication between logical nodes happens on the contracted graph;
    each logical round is charged 2r+1 physical rounds (a convergecast
    plus a broadcast along cluster trees of radius <= r, plus the
    inter-cluster exchange).  The returned trace reports both logical
    and physical round counts; outputs are per cluster-graph node.
    """
    if not clustering.is_partition(graph):
        raise ParameterError("run_on_cluster_graph requires a partition")
    cg = contract(graph, clustering)
    trace = run(cg.graph, program, budget_bits=budget_bits, max_rounds=max_rounds, seed=seed)
    r = clustering.max_radius()
    trace.logical_rounds = trace.rounds_used
    trace.physical_rounds = trace.rounds_used * (2 * r + 1)
    return trace, cg
