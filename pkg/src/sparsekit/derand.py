"""Deterministic cluster sampling via the method of conditional expectation.

Each sampling step of the clustering-based spanner is replaced by a
greedy bit-fixing pass over a utility function that simultaneously
penalizes (a) too many surviving clusters, (b) too many edges added this
iteration, and (c) any high-degree node dying:

    weighted:    U = iota/p^(i+1) * sum_j X_j + sum_v (b_v + n^5 h_v)
    unweighted:  U = iota*L/(g p^(i+1)) * sum_j X_j + sum_v (b_v + n^5 h_v)

where X_j is the per-cluster sample bit, b_v counts the edges node v
adds under the assignment (unweighted mode only counts dying nodes with
more than tau = L/p adjacent clusters; survivors add at most one edge
there, and small-degree deaths are within budget deterministically),
h_v flags a dying node with at least xi = 10 ln(n)/p adjacent clusters,
and L = max(1, ln g).  Expectations are taken against the product
measure that samples every unset bit independently with probability
q = p/4; fixing each bit to the side that does not increase the
conditional expectation yields an assignment whose utility is at most
the initial expectation, which is below the target budget when iota is
large enough — objectives (a)-(c) then all hold and are re-checked at
runtime.

All arithmetic is exact rational; conditional expectations match
brute-force enumeration over the unset bits bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .baswana_sen import BSState, NodeAdjacency, SampleVector, build_adjacency
from .errors import ConfigurationError, InvariantViolation, ParameterError
from .graph import EdgeSet, Graph
from .rational import RAT, as_fraction, rat_ln_upper, sampling_probability

# A partial assignment maps each cluster bit to 0, 1, or None (unset).
PartialAssignment = Sequence["int | None"]


@dataclass(frozen=True)
class UtilityContext:
    """Fixed quantities of one derandomized sampling step."""

    n: int  # node count the run started with (cluster count of iteration 1)
    iteration: int  # 1-based index within the run
    p: Fraction  # sampling probability of the run
    g: int  # total sampled iterations of the run
    weighted: bool
    iota: int
    q: Fraction  # measure for unset bits: p/4
    ln_g: Fraction  # L = max(1, ln g), rational upper bound
    tau: Fraction  # unweighted ignore threshold L/p
    xi: Fraction  # high-degree cutoff, default 10 ln(n)/p
    coef: Fraction  # coefficient of the cluster-count term
    target: Fraction  # budget the initial expectation must stay under

    @classmethod
    def create(
        cls,
        n: int,
        iteration: int,
        p: Fraction | int,
        g: int,
        weighted: bool,
        iota: int = 64,
        xi: Fraction | None = None,
    ) -> "UtilityContext":
        p = Fraction(p)
        if not (0 < p < 1):
            raise ParameterError("derandomization needs 0 < p < 1")
        if iteration < 1 or g < 1 or iteration > g:
            raise ParameterError("need 1 <= iteration <= g")
        ln_g = max(Fraction(1), rat_ln_upper(g)) if g > 1 else Fraction(1)
        tau = ln_g / p
        if xi is None:
            xi = Fraction(10) * rat_ln_upper(max(n, 2)) / p
        if weighted:
            coef = Fraction(iota) / p ** (iteration + 1)
            target = Fraction(iota) * n / p
        else:
            coef = Fraction(iota) * ln_g / (g * p ** (iteration + 1))
            target = Fraction(iota) * n * ln_g / (p * g)
        return cls(n, iteration, p, g, weighted, iota, p / 4, ln_g, tau, xi, coef, target)


def _bit_probs(partial: PartialAssignment, q):
    """(P[bit=0], P[bit=1]) arrays under the q-measure for unset bits."""
    one = q / q if q else None  # exact 1 in the same rational type
    zero = q - q
    p0 = []
    p1 = []
    for b in partial:
        if b is None:
            p1.append(q)
            p0.append(one - q)
        elif b:
            p1.append(one)
            p0.append(zero)
        else:
            p1.append(zero)
            p0.append(one)
    return p0, p1


def _node_terms(view: NodeAdjacency, p0, p1, ctx: UtilityContext, n5, zero, one):
    """Exact (E[b_v], E[h_v]) for one node under the current bit marginals.

    The whole contribution is gated by P[own bit = 0]; inside that
    conditional world the own entry is a certain zero (skipped in the
    first-sampled scan, prefix factor one).
    """
    own0 = p0[view.own]
    if own0 == zero:
        return zero, zero
    d = view.d
    pref = one
    eb = zero
    if ctx.weighted:
        for j, entry in enumerate(view.entries):
            if j == view.own_position:
                continue
            r1 = p1[entry.cluster]
            if r1 != zero:
                eb = eb + pref * r1 * view.adds_if_first[j]
            pref = pref * p0[entry.cluster]
            if pref == zero:
                break
        eb = eb + pref * d
    else:
        for j, entry in enumerate(view.entries):
            if j == view.own_position:
                continue
            pref = pref * p0[entry.cluster]
            if pref == zero:
                break
        if d > ctx.tau:
            eb = pref * d
    eh = pref if d >= ctx.xi else zero
    return own0 * eb, own0 * eh


def conditional_expectation(
    state: BSState, ctx: UtilityContext, partial: PartialAssignment
) -> Fraction:
    """E[U | fixed bits], exactly, under Bernoulli(q) for the unset bits.

    With every bit fixed this is a pure evaluation of the utility.
    """
    clusters = state.clustering.clusters
    if len(partial) != len(clusters):
        raise ParameterError("partial assignment length mismatch")
    views = build_adjacency(state)
    q = RAT(ctx.q.numerator, ctx.q.denominator)
    one = q / q if q != 0 else RAT(1)
    zero = one - one
    p0, p1 = _bit_probs(partial, q)
    n5 = RAT(ctx.n) ** 5
    total = RAT(ctx.coef.numerator, ctx.coef.denominator) * sum(p1, zero)
    for v in sorted(views):
        eb, eh = _node_terms(views[v], p0, p1, ctx, n5, zero, one)
        total = total + eb + n5 * eh
    return as_fraction(total)


def fix_bits(
    state: BSState,
    ctx: UtilityContext,
    *,
    enforce_target: bool = True,
) -> SampleVector:
    """Greedily fix every cluster bit without increasing E[U].

    Bits are fixed in ascending cluster order; each is set to the value
    whose conditional expectation is not larger (ties prefer 0).  The
    final assignment A satisfies U(A) <= E[U], so when the initial
    expectation is below the target budget, the three objectives hold:
    at most n*p^i clusters survive, the counted edge additions stay
    within budget, and no high-degree node dies.  Raises
    ConfigurationError when the initial expectation already exceeds the
    target (iota too small for this instance) unless `enforce_target`
    is off, in which case only the monotone-descent guarantee applies.
    """
    clusters = state.clustering.clusters
    views = build_adjacency(state)
    q = RAT(ctx.q.numerator, ctx.q.denominator)
    one = q / q if q != 0 else RAT(1)
    zero = one - one
    coef = RAT(ctx.coef.numerator, ctx.coef.denominator)
    n5 = RAT(ctx.n) ** 5

    partial: list[int | None] = [None] * len(clusters)
    p0, p1 = _bit_probs(partial, q)

    node_term: dict[int, object] = {}
    for v, view in views.items():
        eb, eh = _node_terms(view, p0, p1, ctx, n5, zero, one)
        node_term[v] = eb + n5 * eh
    cluster_term = coef * sum(p1, zero)
    total = cluster_term + sum(node_term.values(), zero)

    target = RAT(ctx.target.numerator, ctx.target.denominator)
    if enforce_target and total > target:
        raise ConfigurationError(
            f"initial E[U] = {as_fraction(total)} exceeds budget {ctx.target}; "
            f"raise iota (currently {ctx.iota})"
        )

    # Nodes whose contribution depends on bit j: members of cluster j plus
    # alive nodes adjacent to cluster j (deduplicated — a node with alive
    # intra-cluster edges lists its own cluster among its entries too).
    affected_sets: list[set[int]] = [set() for _ in clusters]
    for v, view in views.items():
        affected_sets[view.own].add(v)
        for entry in view.entries:
            affected_sets[entry.cluster].add(v)
    affected = [sorted(s) for s in affected_sets]

    for j in range(len(clusters)):
        candidates = []
        for bit in (0, 1):
            p0[j] = one if bit == 0 else zero
            p1[j] = zero if bit == 0 else one
            new_terms = {}
            delta = coef * ((one if bit else zero) - q)
            for v in affected[j]:
                eb, eh = _node_terms(views[v], p0, p1, ctx, n5, zero, one)
                t = eb + n5 * eh
                new_terms[v] = t
                delta = delta + t - node_term[v]
            candidates.append((total + delta, bit, new_terms))
        # Prefer 0 on ties: candidates[0] is bit 0.
        best = candidates[0] if candidates[0][0] <= candidates[1][0] else candidates[1]
        new_total, bit, new_terms = best
        if new_total > total:
            raise InvariantViolation(
                f"conditional expectation increased fixing bit {j}: "
                f"{as_fraction(total)} -> {as_fraction(new_total)}"
            )
        partial[j] = bit
        p0[j] = one if bit == 0 else zero
        p1[j] = zero if bit == 0 else one
        node_term.update(new_terms)
        total = new_total

    return tuple(bool(b) for b in partial)


def check_objectives(after: BSState, ctx: UtilityContext) -> None:
    """Re-check objectives (a)-(c) on the executed iteration's stats."""
    stats = after.stats
    if stats is None:
        raise ParameterError("state carries no iteration stats")
    if len(after.clustering.clusters) > ctx.n * ctx.p**ctx.iteration:
        raise InvariantViolation(
            f"objective (a): {len(after.clustering.clusters)} clusters survive, "
            f"budget {as_fraction(Fraction(ctx.n) * ctx.p ** ctx.iteration)}"
        )
    if ctx.weighted:
        added = sum(stats.added_per_node.values())
    else:
        added = sum(
            stats.added_per_node[v] for v in stats.died if stats.adjacent_counts[v] > ctx.tau
        )
    if added > ctx.target:
        raise InvariantViolation(
            f"objective (b): {added} edges added, budget {ctx.target}"
        )
    for v in stats.died:
        if stats.adjacent_counts[v] >= ctx.xi:
            raise InvariantViolation(f"objective (c): high-degree node {v} died")


def deterministic_spanner(
    graph: Graph, k: int, *, iota: int = 64, enforce_budget: bool = True
) -> EdgeSet:
    """(2k-1)-spanner with derandomized sampling; bit-identical across runs."""
    from .baswana_sen import initial_state, run_iteration

    if k < 1:
        raise ParameterError("k must be >= 1")
    state = initial_state(graph)
    g = k - 1
    if g >= 1 and graph.n >= 2:
        p = sampling_probability(graph.n, k)
        for i in range(1, g + 1):
            ctx = UtilityContext.create(
                n=graph.n, iteration=i, p=p, g=g, weighted=graph.weighted, iota=iota
            )
            samples = fix_bits(state, ctx, enforce_target=enforce_budget)
            state = run_iteration(state, samples)
            if enforce_budget:
                check_objectives(state, ctx)
    state = run_iteration(state, (False,) * len(state.clustering.clusters))
    if state.alive or state.alive_edges:
        raise InvariantViolation("nodes or edges survived the final iteration")
    return EdgeSet(graph, state.spanner)
