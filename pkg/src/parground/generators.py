"""Deterministic benchmark instance generators.

Four problem families, each emitted as plain program text: graph
3-coloring on a triangular grid, n-queens, reachability on complete
k-ary trees, and Hamiltonian path on seeded random digraphs.  All
generators are pure functions of their parameters (plus an explicit
seed for the random family), so any instance can be regenerated
bit-for-bit from its name.

The language has no arithmetic built-ins, so encodings that need
order or sums carry them as precomputed relations (``lt``, ``plus``)
over the integer constants of the instance.
"""
from __future__ import annotations

import random


def _facts(name: str, tuples: list[tuple]) -> list[str]:
    return ["%s(%s)." % (name, ",".join(str(t) for t in row)) for row in tuples]


def threecol(n: int) -> str:
    """3-coloring of a triangular grid with side ``n``.

    Nodes are the lattice points (i, j) with i + j <= n; each unit
    triangle contributes a right, an up and a diagonal edge, giving a
    planar, 3-colorable graph that grows quadratically with n.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    nodes = [
        "n%d_%d" % (i, j)
        for i in range(n + 1)
        for j in range(n + 1 - i)
    ]
    edges: list[tuple[str, str]] = []
    for i in range(n + 1):
        for j in range(n + 1 - i):
            if i + j + 1 <= n:
                edges.append(("n%d_%d" % (i, j), "n%d_%d" % (i + 1, j)))
                edges.append(("n%d_%d" % (i, j), "n%d_%d" % (i, j + 1)))
                edges.append(("n%d_%d" % (i + 1, j), "n%d_%d" % (i, j + 1)))
    lines = [
        "col(X,red) | col(X,yellow) | col(X,green) :- node(X).",
        ":- edge(X,Y), col(X,C), col(Y,C).",
    ]
    lines += _facts("node", [(v,) for v in nodes])
    lines += _facts("edge", edges)
    return "\n".join(lines) + "\n"


def nqueens(n: int) -> str:
    """n-queens: one disjunctive guess per row and four constraints
    (column clash, row clash, and the two diagonal directions, the
    latter expressed through a ternary addition relation)."""
    if n < 1:
        raise ValueError("need n >= 1")
    heads = " | ".join("queen(X,%d)" % c for c in range(1, n + 1))
    lines = [
        "%s :- row(X)." % heads,
        ":- queen(X1,Y), queen(X2,Y), lt(X1,X2).",
        ":- queen(X,Y1), queen(X,Y2), lt(Y1,Y2).",
        ":- queen(X1,Y1), queen(X2,Y2), lt(X1,X2), plus(X1,Y2,S), plus(X2,Y1,S).",
        ":- queen(X1,Y1), queen(X2,Y2), lt(X1,X2), plus(X1,Y1,S), plus(X2,Y2,S).",
    ]
    lines += _facts("row", [(i,) for i in range(1, n + 1)])
    lines += _facts(
        "lt",
        [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)],
    )
    lines += _facts(
        "plus",
        [
            (i, j, i + j)
            for i in range(1, n + 1)
            for j in range(1, n + 1)
        ],
    )
    return "\n".join(lines) + "\n"


def reach(levels: int, siblings: int) -> str:
    """Reachability over a complete ``siblings``-ary tree of ``levels``
    levels (heap numbering, root 1).  The classic two-rule transitive
    closure sits on top: one exit rule and one recursive rule."""
    if levels < 1 or siblings < 1:
        raise ValueError("need levels >= 1 and siblings >= 1")
    total = sum(siblings**l for l in range(levels))
    edges = []
    for parent in range(1, total + 1):
        for j in range(siblings):
            child = siblings * (parent - 1) + 2 + j
            if child <= total:
                edges.append((parent, child))
    lines = [
        "reach(X,Y) :- edge(X,Y).",
        "reach(X,Z) :- reach(X,Y), edge(Y,Z).",
    ]
    lines += _facts("edge", edges)
    return "\n".join(lines) + "\n"


def hampath(n: int, seed: int, degree: int = 3) -> str:
    """Hamiltonian path on a seeded random digraph with ``n`` nodes.

    Every node gets ``degree`` distinct random successors.  The
    encoding guesses each edge in or out of the path, closes
    reachability from the start node recursively, and constrains the
    chosen edges to form a single path covering every node.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if not 1 <= degree < n:
        raise ValueError("need 1 <= degree < n")
    rng = random.Random(seed)
    edges: list[tuple[int, int]] = []
    for src in range(1, n + 1):
        others = [v for v in range(1, n + 1) if v != src]
        for dst in sorted(rng.sample(others, degree)):
            edges.append((src, dst))
    lines = [
        "inpath(X,Y) | outpath(X,Y) :- edge(X,Y).",
        "reached(X) :- start(X).",
        "reached(Y) :- reached(X), inpath(X,Y).",
        ":- inpath(X,Y1), inpath(X,Y2), lt(Y1,Y2).",
        ":- inpath(X1,Y), inpath(X2,Y), lt(X1,X2).",
        ":- node(X), not reached(X).",
    ]
    lines += _facts("node", [(v,) for v in range(1, n + 1)])
    lines += _facts("start", [(1,)])
    lines += _facts("edge", edges)
    lines += _facts(
        "lt",
        [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)],
    )
    return "\n".join(lines) + "\n"


GENERATORS = {
    "threecol": threecol,
    "nqueens": nqueens,
    "reach": reach,
    "hampath": hampath,
}


def generate_instance(problem: str, **params) -> str:
    """Dispatch by problem name; raises ValueError for unknown names
    or out-of-range parameters."""
    try:
        generator = GENERATORS[problem]
    except KeyError:
        raise ValueError(
            "unknown problem %r (choose from %s)"
            % (problem, ", ".join(sorted(GENERATORS)))
        ) from None
    return generator(**params)
