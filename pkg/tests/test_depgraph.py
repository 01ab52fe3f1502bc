"""Dependency graph condensation and component scheduling order."""
import pytest

from parground.depgraph import (
    build_dependency_graph,
    compute_components,
    dot_condensation,
    ready_components,
)
from parground.parser import parse_program


def components_of(text):
    return compute_components(parse_program(text))


def by_label(components):
    return {c.label: c for c in components}


def test_single_recursive_component():
    comps = components_of(
        "e(a,b). reach(X,Y) :- e(X,Y). reach(X,Z) :- reach(X,Y), e(Y,Z)."
    )
    assert len(comps) == 1
    (c,) = comps
    assert c.predicates == {"reach"}
    assert len(c.exit_rules) == 1
    assert len(c.recursive_rules) == 1
    assert c.depends_on == frozenset()
    assert not c.is_constraint


def test_exit_vs_recursive_uses_positive_body_only():
    comps = components_of("e(a). p(X) :- e(X), not p(X).")
    (c,) = comps
    # the self-reference is negative, so the rule is an exit rule
    assert len(c.exit_rules) == 1
    assert c.recursive_rules == ()


def test_mutual_recursion_collapses_to_one_component():
    comps = components_of(
        "e(a,b). p(X) :- q(X). q(X) :- e(X,Y), p(Y). q(X) :- e(X,X)."
    )
    labels = by_label(comps)
    assert "p,q" in labels
    assert labels["p,q"].predicates == {"p", "q"}


def test_disjunctive_heads_share_a_component():
    comps = components_of("e(a). in(X) | out(X) :- e(X).")
    labels = by_label(comps)
    assert "in,out" in labels
    rule_home = labels["in,out"]
    # an empty positive-intersection body makes it an exit rule
    assert len(rule_home.exit_rules) == 1


def test_component_ids_are_topological():
    comps = components_of(
        """
        e(a,b).
        base(X) :- e(X,Y).
        middle(X) :- base(X).
        top(X) :- middle(X).
        """
    )
    labels = by_label(comps)
    assert labels["base"].id < labels["middle"].id < labels["top"].id
    assert labels["middle"].depends_on == {labels["base"].id}
    assert labels["top"].depends_on == {labels["middle"].id}


def test_negative_literals_create_no_dependency_arcs():
    graph = build_dependency_graph(
        parse_program("e(a). p(X) :- e(X), not q(X). q(X) :- e(X).")
    )
    assert ("q", "p") not in graph.edges


def test_constraints_get_synthetic_trailing_components(four_node_colouring):
    comps = compute_components(parse_program(four_node_colouring))
    assert [c.label for c in comps] == ["col", "constraint_1"]
    constraint = comps[1]
    assert constraint.is_constraint
    assert constraint.predicates == frozenset()
    assert constraint.depends_on == {comps[0].id}
    assert constraint.exit_rules == constraint.rules


def test_constraint_on_pure_edb_has_no_dependencies():
    comps = components_of("e(a,b). :- e(X,X).")
    (c,) = comps
    assert c.is_constraint
    assert c.depends_on == frozenset()


def test_determinism_of_ids_and_labels():
    text = """
    e(a,b).
    first(X) :- e(X,Y).
    second(X) :- e(X,Y).
    uses(X) :- first(X), second(X).
    """
    a = components_of(text)
    b = components_of(text)
    assert [(c.id, c.label, c.depends_on) for c in a] == [
        (c.id, c.label, c.depends_on) for c in b
    ]
    # independent components tie-break by label
    labels = [c.label for c in a]
    assert labels.index("first") < labels.index("second")


def test_ready_components_respects_dependencies():
    comps = components_of(
        """
        e(a,b).
        base(X) :- e(X,Y).
        top(X) :- base(X).
        other(X) :- e(X,Y).
        """
    )
    labels = by_label(comps)
    assert ready_components(comps, set()) == sorted(
        [labels["base"].id, labels["other"].id]
    )
    done = {labels["base"].id}
    assert labels["top"].id in ready_components(comps, done | {labels["other"].id})
    assert labels["top"].id not in ready_components(comps, set())


def test_every_rule_lands_in_exactly_one_component(four_node_colouring):
    program = parse_program(four_node_colouring)
    comps = compute_components(program)
    seen = [r.id for c in comps for r in c.rules]
    assert sorted(seen) == [r.id for r in program.rules]


def test_dot_condensation_shape():
    comps = components_of(
        "e(a,b). base(X) :- e(X,Y). top(X) :- base(X)."
    )
    dot = dot_condensation(comps)
    assert dot.startswith("digraph dependencies {\n")
    assert dot.endswith("}\n")
    assert '  "base";' in dot
    assert '  "base" -> "top";' in dot


def test_dot_condensation_is_stable():
    text = "e(a,b). p(X) :- e(X,Y). q(X) :- p(X). :- q(X), p(X)."
    assert dot_condensation(components_of(text)) == dot_condensation(
        components_of(text)
    )
