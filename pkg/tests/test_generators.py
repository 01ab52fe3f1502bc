"""Benchmark instance generators: shapes, determinism, and (for the
smallest instances) full semantic checks against the oracle."""
import pytest

from parground.engine import ground_program
from parground.generators import (
    generate_instance,
    hampath,
    nqueens,
    reach,
    threecol,
)
from parground.oracle import answer_sets
from parground.parser import parse_program


def edb_count(program, predicate):
    return sum(1 for a in program.edb if a.predicate == predicate)


def test_threecol_grid_shape():
    program = parse_program(threecol(2))
    assert edb_count(program, "node") == 6
    assert edb_count(program, "edge") == 9
    assert len(program.rules) == 2  # the guess and the clash constraint
    rules = sorted(program.rules, key=lambda r: len(r.head), reverse=True)
    assert len(rules[0].head) == 3
    assert rules[1].is_constraint


def test_threecol_triangle_has_six_colourings():
    program = parse_program(threecol(1))
    fams = answer_sets(program)
    assert len(fams) == 6
    for family in fams:
        cols = {str(a) for a in family if a.predicate == "col"}
        assert len(cols) == 3


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_threecol_edge_count_is_three_per_unit_triangle(n):
    program = parse_program(threecol(n))
    triangles = n * (n + 1) // 2
    assert edb_count(program, "edge") == 3 * triangles
    assert edb_count(program, "node") == (n + 1) * (n + 2) // 2


def test_nqueens_shape():
    program = parse_program(nqueens(4))
    assert edb_count(program, "row") == 4
    assert edb_count(program, "lt") == 6
    assert edb_count(program, "plus") == 16
    guesses = [r for r in program.rules if not r.is_constraint]
    assert len(guesses) == 1
    assert len(guesses[0].head) == 4
    assert sum(r.is_constraint for r in program.rules) == 4


def test_two_queens_is_unsatisfiable():
    assert answer_sets(parse_program(nqueens(2))) == set()


def test_reach_tree_shape():
    program = parse_program(reach(3, 2))
    assert edb_count(program, "edge") == 6
    assert len(program.rules) == 2
    recursive = [r for r in program.rules if len(r.body) == 2]
    assert len(recursive) == 1


def test_reach_extension_is_the_ancestor_relation():
    program = parse_program(reach(3, 2))
    result = ground_program(program)
    reached = result.extensions["reach"]
    assert len(reached) == 10  # 6 parent edges + 4 grandparent pairs


@pytest.mark.parametrize(
    ("levels", "siblings", "nodes"),
    [(1, 2, 1), (2, 3, 4), (4, 2, 15), (3, 3, 13)],
)
def test_reach_node_count(levels, siblings, nodes):
    program = parse_program(reach(levels, siblings))
    constants = {t.name for a in program.edb for t in a.terms}
    # a single-node tree has no edges, hence no constants at all
    assert len(constants) == (nodes if nodes > 1 else 0)


def test_hampath_is_deterministic_per_seed():
    assert hampath(20, seed=7) == hampath(20, seed=7)
    assert hampath(20, seed=7) != hampath(20, seed=8)


def test_hampath_shape():
    program = parse_program(hampath(10, seed=1, degree=3))
    assert edb_count(program, "node") == 10
    assert edb_count(program, "start") == 1
    assert edb_count(program, "edge") == 30  # degree successors per node
    assert edb_count(program, "lt") == 45
    assert sum(r.is_constraint for r in program.rules) == 3
    assert len(program.rules) == 6


def test_hampath_edges_are_simple():
    program = parse_program(hampath(12, seed=3, degree=4))
    edges = [tuple(t.name for t in a.terms) for a in program.edb if a.predicate == "edge"]
    assert len(edges) == len(set(edges))
    assert all(src != dst for src, dst in edges)


@pytest.mark.parametrize(
    "text",
    [
        threecol(3),
        nqueens(5),
        reach(4, 2),
        hampath(8, seed=2, degree=2),
    ],
)
def test_generated_programs_ground_cleanly(text):
    result = ground_program(parse_program(text))
    assert result.pi


@pytest.mark.parametrize(
    ("problem", "params"),
    [
        ("threecol", {"n": 0}),
        ("nqueens", {"n": -1}),
        ("reach", {"levels": 0, "siblings": 2}),
        ("reach", {"levels": 3, "siblings": 0}),
        ("hampath", {"n": 1, "seed": 1}),
        ("hampath", {"n": 5, "seed": 1, "degree": 5}),
    ],
)
def test_parameter_validation(problem, params):
    with pytest.raises(ValueError):
        generate_instance(problem, **params)


def test_generate_instance_dispatch():
    assert generate_instance("reach", levels=3, siblings=2) == reach(3, 2)
    with pytest.raises(ValueError, match="unknown problem"):
        generate_instance("mystery", n=3)
