"""Single-rule parallelism: split-literal selection and extension splitting.

To parallelize one rule, the extension of exactly one positive body
literal is partitioned into contiguous index ranges ("virtual splits"),
and the rule is instantiated once per range.  Which literal to split is
a cost question: splitting the i-th literal only divides the work that
happens from position i onward, so the estimated per-split cost is

    cost_i = (total - before_i) / splits_i + before_i

where ``total`` is the whole-body cost, ``before_i`` the cost of the
prefix strictly before i, and ``splits_i`` the achievable split count
(never more splits than the literal has tuples).  Division rounds to
the nearest integer.

Two shortcuts keep selection cheap.  If the first literal supports the
full requested split count, it is chosen outright without computing any
cost.  Otherwise candidates are scanned left to right and the scan
stops at the first literal that supports the full count: anything to
its right can be shown to cost at least as much.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .stats import CostVector, RelationStats


@dataclass(frozen=True, slots=True)
class VirtualSplit:
    """Half-open index ranges into the accumulated and delta sequences
    of the split literal's extension.  Materializes nothing."""

    s_start: int = 0
    s_stop: int = 0
    d_start: int = 0
    d_stop: int = 0

    @property
    def size(self) -> int:
        return (self.s_stop - self.s_start) + (self.d_stop - self.d_start)


@dataclass(frozen=True, slots=True)
class SplitChoice:
    """Outcome of split-literal selection for one rule."""

    index: int  # 1-based position in the ordered positive body
    requested: int  # split count asked for
    allowed: int  # split count achievable at the chosen literal
    cost: int | None  # estimated per-split cost; None on the shortcut
    shortcut: bool  # first literal supported the full count
    cost_table: tuple[tuple[int, int, int], ...] = ()  # (index, allowed, cost) per scanned literal


def allowed_splits(requested: int, stats: RelationStats) -> int:
    """A literal cannot be split into more ranges than it has tuples.
    Degenerate empty extensions clamp to one (such rules produce no
    instances; the clamp only avoids a division by zero)."""
    return max(1, min(requested, stats.size))


def _round_div(num: int, div: int) -> int:
    return (num + div // 2) // div


def split_cost(
    position: int,
    requested: int,
    costs: CostVector,
    stats: Sequence[RelationStats],
) -> tuple[int, int]:
    """Estimated per-split cost of splitting the literal at 1-based
    ``position`` into ``requested`` ranges, together with the split
    count the literal actually supports."""
    before = costs.cost_before(position)
    splits = allowed_splits(requested, stats[position - 1])
    return before + _round_div(costs.total - before, splits), splits


def select_split_literal(
    costs: CostVector,
    stats: Sequence[RelationStats],
    requested: int,
) -> SplitChoice | None:
    """Pick the cheapest literal to split, or ``None`` for an empty body.

    Ties go to the smallest index.  The scan is cut short at the first
    literal whose extension supports the full requested count, and is
    skipped entirely when that is already true of the first literal.
    """
    n = len(stats)
    if n == 0:
        return None
    if allowed_splits(requested, stats[0]) == requested:
        return SplitChoice(
            index=1,
            requested=requested,
            allowed=requested,
            cost=None,
            shortcut=True,
        )
    table: list[tuple[int, int, int]] = []
    best_index = 0
    best_cost: int | None = None
    for i in range(1, n + 1):
        cost, allowed = split_cost(i, requested, costs, stats)
        table.append((i, allowed, cost))
        if best_cost is None or cost < best_cost:
            best_cost = cost
            best_index = i
        if allowed == requested:
            break
    assert best_cost is not None
    return SplitChoice(
        index=best_index,
        requested=requested,
        allowed=allowed_splits(requested, stats[best_index - 1]),
        cost=best_cost,
        shortcut=False,
        cost_table=tuple(table),
    )


def split_extension(s_len: int, d_len: int, requested: int) -> list[VirtualSplit]:
    """Partition an extension of ``s_len`` accumulated plus ``d_len``
    delta tuples into contiguous virtual splits.

    The split count is clamped to at least one and at most the total
    tuple count; the target size is ``total // count``.  Whole splits
    are carved from the accumulated part first; if it does not divide
    evenly, one split mixes its tail with the head of the delta part;
    whole splits then continue through the delta and a final short
    split absorbs any remainder, so the ranges are pairwise disjoint
    and cover every tuple exactly once (occasionally yielding one or
    two more splits than asked for).
    """
    total = s_len + d_len
    if total == 0:
        return [VirtualSplit()]
    count = max(1, min(requested, total))
    size = total // count

    splits: list[VirtualSplit] = []
    s_pos = 0
    while len(splits) < s_len // size:
        splits.append(VirtualSplit(s_start=s_pos, s_stop=s_pos + size))
        s_pos += size

    d_pos = 0
    if s_pos < s_len:
        shortfall = size - (s_len - s_pos)
        take = d_len if d_len < shortfall else shortfall
        splits.append(
            VirtualSplit(s_start=s_pos, s_stop=s_len, d_start=0, d_stop=take)
        )
        d_pos = take

    while len(splits) < total // size:
        splits.append(VirtualSplit(d_start=d_pos, d_stop=d_pos + size))
        d_pos += size

    if d_pos < d_len:
        splits.append(VirtualSplit(d_start=d_pos, d_stop=d_len))
    return splits


def explode_tail(splits: list[VirtualSplit], keep: int) -> list[VirtualSplit]:
    """Replace every split after the first ``keep`` with single-tuple
    splits covering the same ranges.  Used for very heavy rules, where
    the equal-size tail is re-emitted at the finest possible grain so
    stragglers can be balanced across workers."""
    if keep < 0:
        keep = 0
    out = list(splits[:keep])
    for vs in splits[keep:]:
        out.extend(
            VirtualSplit(s_start=i, s_stop=i + 1)
            for i in range(vs.s_start, vs.s_stop)
        )
        out.extend(
            VirtualSplit(d_start=i, d_stop=i + 1)
            for i in range(vs.d_start, vs.d_stop)
        )
    return out
