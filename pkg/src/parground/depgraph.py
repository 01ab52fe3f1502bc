"""Predicate dependency graph, components and evaluation order.

The graph has one node per IDB predicate and an arc p -> q whenever
some rule derives q with p in its positive body.  Head predicates of a
disjunctive rule are forced into the same component (auxiliary arcs in
both directions), so every rule belongs to exactly one component — the
one defining its head predicates.

Each integrity constraint gets its own synthetic component that depends
on the components of the positive IDB predicates in its body; it can
therefore be scheduled like any other component, after its inputs are
fully evaluated.  Negative literals never create dependencies: the
grounder emits them verbatim, so no stratification order is needed.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .model import Program, Rule


@dataclass(frozen=True, slots=True)
class Component:
    """One schedulable unit: an SCC of predicates or a single constraint."""

    id: int
    predicates: frozenset[str]
    rules: tuple[Rule, ...]
    exit_rules: tuple[Rule, ...]
    recursive_rules: tuple[Rule, ...]
    depends_on: frozenset[int]
    label: str
    is_constraint: bool = False


@dataclass(frozen=True, slots=True)
class DependencyGraph:
    nodes: frozenset[str]
    edges: frozenset[tuple[str, str]]  # (p, q): q depends on p

    def successors(self, p: str) -> list[str]:
        return sorted(q for (src, q) in self.edges if src == p)


def build_dependency_graph(program: Program) -> DependencyGraph:
    """Arcs between IDB predicates: positive body -> head, plus
    bidirectional arcs between the head predicates of each rule."""
    idb = program.idb_predicates
    edges: set[tuple[str, str]] = set()
    for rule in program.rules:
        heads = [a.predicate for a in rule.head if a.predicate in idb]
        pos = {l.atom.predicate for l in rule.body if l.positive}
        for q in heads:
            for p in pos:
                if p in idb:
                    edges.add((p, q))
        for a in heads:
            for b in heads:
                if a != b:
                    edges.add((a, b))
                    edges.add((b, a))
    return DependencyGraph(nodes=frozenset(idb), edges=frozenset(edges))


def _strongly_connected(nodes: Sequence[str], succ: Mapping[str, list[str]]) -> list[list[str]]:
    """Iterative Tarjan; SCCs come out in reverse topological order."""
    index: dict[str, int] = {}
    lowlink: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    sccs: list[list[str]] = []
    counter = 0

    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(succ.get(root, ())))]
        index[root] = lowlink[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for child in it:
                if child not in index:
                    index[child] = lowlink[child] = counter
                    counter += 1
                    stack.append(child)
                    on_stack.add(child)
                    work.append((child, iter(succ.get(child, ()))))
                    advanced = True
                    break
                if child in on_stack:
                    lowlink[node] = min(lowlink[node], index[child])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[node])
            if lowlink[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.remove(w)
                    comp.append(w)
                    if w == node:
                        break
                sccs.append(comp)
    return sccs


def compute_components(program: Program) -> tuple[Component, ...]:
    """Condense the dependency graph and assign every rule a component.

    Component ids are topologically sorted (dependencies first) and
    deterministic: ties are broken by the lexicographically smallest
    label, and constraint components follow all predicate components in
    rule-id order.
    """
    graph = build_dependency_graph(program)
    succ: dict[str, list[str]] = {n: [] for n in sorted(graph.nodes)}
    for p, q in sorted(graph.edges):
        succ[p].append(q)

    sccs = _strongly_connected(sorted(graph.nodes), succ)
    scc_of: dict[str, int] = {}
    for i, comp in enumerate(sccs):
        for p in comp:
            scc_of[p] = i

    # Direct dependencies between SCCs.
    scc_deps: dict[int, set[int]] = {i: set() for i in range(len(sccs))}
    for p, q in graph.edges:
        if scc_of[p] != scc_of[q]:
            scc_deps[scc_of[q]].add(scc_of[p])

    # Deterministic topological numbering of the predicate SCCs.
    labels = {i: ",".join(sorted(sccs[i])) for i in range(len(sccs))}
    remaining = set(range(len(sccs)))
    order: list[int] = []
    placed: set[int] = set()
    while remaining:
        ready = sorted(
            (labels[i], i) for i in remaining if scc_deps[i] <= placed
        )
        _, pick = ready[0]
        order.append(pick)
        placed.add(pick)
        remaining.remove(pick)

    new_id = {scc: idx for idx, scc in enumerate(order)}

    rules_of: dict[int, list[Rule]] = {idx: [] for idx in range(len(sccs))}
    constraints: list[Rule] = []
    for rule in program.rules:
        if rule.is_constraint:
            constraints.append(rule)
        else:
            rules_of[new_id[scc_of[rule.head[0].predicate]]].append(rule)

    components: list[Component] = []
    for idx, scc in enumerate(order):
        preds = frozenset(sccs[scc])
        rules = tuple(sorted(rules_of[idx], key=lambda r: r.id))
        exit_rules = []
        recursive_rules = []
        for r in rules:
            if any(l.positive and l.atom.predicate in preds for l in r.body):
                recursive_rules.append(r)
            else:
                exit_rules.append(r)
        components.append(
            Component(
                id=idx,
                predicates=preds,
                rules=rules,
                exit_rules=tuple(exit_rules),
                recursive_rules=tuple(recursive_rules),
                depends_on=frozenset(new_id[d] for d in scc_deps[scc]),
                label=labels[scc],
            )
        )

    next_id = len(components)
    idb = program.idb_predicates
    for rule in constraints:
        deps = frozenset(
            new_id[scc_of[l.atom.predicate]]
            for l in rule.body
            if l.positive and l.atom.predicate in idb
        )
        components.append(
            Component(
                id=next_id,
                predicates=frozenset(),
                rules=(rule,),
                exit_rules=(rule,),
                recursive_rules=(),
                depends_on=deps,
                label="constraint_%d" % rule.id,
                is_constraint=True,
            )
        )
        next_id += 1
    return tuple(components)


def ready_components(
    components: Iterable[Component], done: set[int]
) -> list[int]:
    """Ids of components whose dependencies are all done, in id order."""
    return sorted(
        c.id for c in components if c.id not in done and c.depends_on <= done
    )


def dot_condensation(components: Iterable[Component]) -> str:
    """The component DAG as DOT text, one ``p -> q`` line per edge."""
    comps = sorted(components, key=lambda c: c.id)
    by_id = {c.id: c for c in comps}
    lines = ["digraph dependencies {"]
    for c in comps:
        lines.append('  "%s";' % c.label)
    for c in comps:
        for dep in sorted(c.depends_on):
            lines.append('  "%s" -> "%s";' % (by_id[dep].label, c.label))
    lines.append("}")
    return "\n".join(lines) + "\n"
