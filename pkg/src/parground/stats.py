"""Relation statistics, join-size estimation and body ordering.

The instantiation cost of a rule body is estimated bottom-up from two
exact quantities collected over the stored extensions: the tuple count
of each body literal's relation and, per variable, the number of
distinct values it takes.  Join sizes follow the classic
selectivity-based formula

    size(R >< S) = size(R) * size(S) / prod over shared X of
                   max(distinct(X, R), distinct(X, S))

with integer floor division, a floor of one when both inputs are
non-empty, and zero when either input is empty.  All arithmetic
saturates at a 64-bit-style maximum: these numbers only rank
alternatives, they are never dereferenced.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

from .model import Literal, Rule

if TYPE_CHECKING:  # pragma: no cover - typing only
    from .store import ExtensionStore

SATURATION_MAX = 2**63 - 1


def sat_mul(a: int, b: int) -> int:
    v = a * b
    return v if v <= SATURATION_MAX else SATURATION_MAX


def sat_add(a: int, b: int) -> int:
    v = a + b
    return v if v <= SATURATION_MAX else SATURATION_MAX


@dataclass(frozen=True, slots=True)
class RelationStats:
    """Exact size and per-variable distinct-value counts of one literal's
    relation.  ``distinct`` is keyed by variable name; for a variable
    occurring more than once in the literal the count is taken at its
    first occurrence."""

    size: int
    distinct: dict[str, int]

    def variables(self) -> set[str]:
        return set(self.distinct)


def collect_stats(literal: Literal, store: "ExtensionStore") -> RelationStats:
    """Count tuples and distinct values over the current stored
    extension (accumulated plus fresh-delta view) of the literal's
    predicate."""
    pred = literal.atom.predicate
    first_pos: dict[str, int] = {}
    for pos, term in enumerate(literal.atom.terms):
        if term.is_variable and term.name not in first_pos:
            first_pos[term.name] = pos
    values: dict[str, set[str]] = {v: set() for v in first_pos}
    size = 0
    for atom in store.atoms_view(pred):
        size += 1
        for v, pos in first_pos.items():
            values[v].add(atom.terms[pos].name)
    return RelationStats(size=size, distinct={v: len(s) for v, s in values.items()})


def estimate_join_size(left: RelationStats, right: RelationStats) -> int:
    """Estimated tuple count of joining two relations (symmetric)."""
    if left.size == 0 or right.size == 0:
        return 0
    denom = 1
    for v in left.distinct.keys() & right.distinct.keys():
        denom = sat_mul(denom, max(left.distinct[v], right.distinct[v], 1))
    est = sat_mul(left.size, right.size) // denom
    return max(est, 1)


def _join_stats(left: RelationStats, right: RelationStats) -> RelationStats:
    """Statistics propagated to the join result: shared variables keep
    the smaller distinct count, unshared ones carry over unchanged."""
    size = estimate_join_size(left, right)
    distinct: dict[str, int] = {}
    for v, c in left.distinct.items():
        distinct[v] = c
    for v, c in right.distinct.items():
        distinct[v] = min(distinct[v], c) if v in distinct else c
    return RelationStats(size=size, distinct=distinct)


@dataclass(frozen=True, slots=True)
class CostVector:
    """Cumulative instantiation cost of the ordered positive body.

    ``prefix_costs[k-1]`` is the cost of materializing the join of the
    first k literals: zero for fewer than two literals, then each step
    adds (estimated size of the previous prefix) * (size of the next
    literal).  ``prefix_sizes[k-1]`` is the estimated tuple count of
    the first-k join itself.
    """

    prefix_costs: tuple[int, ...]
    prefix_sizes: tuple[int, ...] = ()

    @property
    def total(self) -> int:
        return self.prefix_costs[-1] if self.prefix_costs else 0

    def cost_before(self, position: int) -> int:
        """Cost of the prefix strictly before 1-based ``position``."""
        if position <= 2:
            return 0
        return self.prefix_costs[position - 2]


def body_cost(ordered_stats: Sequence[RelationStats]) -> CostVector:
    """Cost vector for a body whose positive literals carry
    ``ordered_stats`` in evaluation order.  Costs are non-decreasing by
    construction."""
    if not ordered_stats:
        return CostVector(prefix_costs=(), prefix_sizes=())
    costs = [0]
    prefix = ordered_stats[0]
    sizes = [prefix.size]
    for stats in ordered_stats[1:]:
        costs.append(sat_add(costs[-1], sat_mul(prefix.size, stats.size)))
        prefix = _join_stats(prefix, stats)
        sizes.append(prefix.size)
    return CostVector(prefix_costs=tuple(costs), prefix_sizes=tuple(sizes))


@dataclass(frozen=True, slots=True)
class OrderedBody:
    """A rule body rearranged for evaluation: positive literals in join
    order followed by the negative literals, each negative placed no
    earlier than the point where its variables are bound."""

    literals: tuple[Literal, ...]
    positive_count: int
    stats: tuple[RelationStats, ...]  # aligned with the positive prefix

    @property
    def positives(self) -> tuple[Literal, ...]:
        return self.literals[: self.positive_count]


def order_body(rule: Rule, store: "ExtensionStore") -> OrderedBody:
    """Greedy join order for a rule body.

    Starts from the positive literal with the smallest relation, then
    repeatedly appends the literal with the smallest estimated join
    size against the current prefix, preferring literals that share a
    variable with it; every tie falls back to the original body
    position.  Negative literals keep the rule safe under left-to-right
    binding: they all come after the positive literals, ordered by the
    prefix length that first binds all their variables.
    """
    positives = [
        (idx, lit) for idx, lit in enumerate(rule.body) if lit.positive
    ]
    negatives = [
        (idx, lit) for idx, lit in enumerate(rule.body) if not lit.positive
    ]
    if not positives:
        return OrderedBody(
            literals=tuple(lit for _, lit in negatives),
            positive_count=0,
            stats=(),
        )

    stats = {idx: collect_stats(lit, store) for idx, lit in positives}
    remaining = dict(positives)

    start = min(remaining, key=lambda idx: (stats[idx].size, idx))
    chosen = [start]
    prefix = stats[start]
    del remaining[start]

    while remaining:
        sharing = [
            idx
            for idx in remaining
            if stats[idx].variables() & prefix.variables()
        ]
        pool = sharing if sharing else list(remaining)
        best = min(
            pool, key=lambda idx: (estimate_join_size(prefix, stats[idx]), idx)
        )
        chosen.append(best)
        prefix = _join_stats(prefix, stats[best])
        del remaining[best]

    bound_after: list[set[str]] = []
    acc: set[str] = set()
    for idx in chosen:
        acc |= stats[idx].variables()
        bound_after.append(set(acc))

    def bind_point(lit: Literal) -> int:
        needed = set(lit.atom.variables())
        for k, bound in enumerate(bound_after):
            if needed <= bound:
                return k
        return len(bound_after)  # variable-free negatives sort first anyway

    ordered_negatives = sorted(
        negatives, key=lambda pair: (bind_point(pair[1]), pair[0])
    )

    literals = tuple(rule.body[idx] for idx in chosen) + tuple(
        lit for _, lit in ordered_negatives
    )
    return OrderedBody(
        literals=literals,
        positive_count=len(chosen),
        stats=tuple(stats[idx] for idx in chosen),
    )
