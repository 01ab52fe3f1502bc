"""Brute-force reference semantics: reducts, minimality, answer sets."""
import pytest
from hypothesis import given
from hypothesis import strategies as st

from parground.engine import ground_program
from parground.model import Atom, GroundRule, Literal, Term, fact_rules
from parground.oracle import (
    DEFAULT_ENUM_CAP,
    DEFAULT_GROUND_CAP,
    FRESH_CONSTANT,
    OracleCapError,
    answer_sets,
    check_ans_equivalence,
    derivable_closure,
    flp_reduct,
    ground_answer_sets,
    herbrand_base_size,
    herbrand_universe,
    is_model,
    naive_ground,
    oracle_ground,
)
from parground.parser import parse_program


def atom(name, *terms):
    return Atom(name, tuple(Term(str(t)) for t in terms))


def families(text, **kwargs):
    """Answer sets as a set of frozensets of atom strings."""
    return {
        frozenset(str(a) for a in family)
        for family in answer_sets(parse_program(text), **kwargs)
    }


# -- universes and naive grounding ----------------------------------------------


def test_herbrand_universe_sorted():
    program = parse_program("e(b,a). p(X) :- e(X,c).")
    assert herbrand_universe(program) == ["a", "b", "c"]


def test_herbrand_universe_fresh_constant_fallback():
    program = parse_program("p :- q. q.")
    assert herbrand_universe(program) == [FRESH_CONSTANT]
    assert herbrand_base_size(program) == 2  # p and q, arity zero


def test_herbrand_base_size_counts_arity_power():
    program = parse_program("e(a,b). p(X) :- e(X,X).")
    # two constants: e contributes 2^2, p contributes 2^1
    assert herbrand_base_size(program) == 6


def test_naive_ground_enumerates_all_substitutions():
    program = parse_program("p(X,Y) :- e(X), f(Y). e(a). f(b).")
    instances = naive_ground(program)
    assert len(instances) == 4  # (a|b) x (a|b); EDB facts not included
    assert all(len(g.body) == 2 for g in instances)


def test_naive_ground_cap():
    program = parse_program(
        "p(A,B,C,D) :- e(A), e(B), e(C), e(D). e(a). e(b). e(c). e(d)."
    )
    with pytest.raises(OracleCapError, match="naive grounding"):
        naive_ground(program, cap=255)
    assert len(naive_ground(program, cap=256)) == 256


def test_oracle_ground_filters_underivable_instances():
    program = parse_program("p(X) :- e(X), g(X). g(X) :- p(X). e(a).")
    assert oracle_ground(program) == set()
    reachable = parse_program("q(X) :- e(X). p(X) :- q(X). e(a).")
    assert {str(g) for g in oracle_ground(reachable)} == {
        "q(a) :- e(a).",
        "p(a) :- q(a).",
    }


def test_derivable_closure_ignores_negation():
    rules = {
        GroundRule((atom("p"),), (Literal(atom("e"), True), Literal(atom("q"), False))),
    }
    assert derivable_closure(rules, seed=[atom("e")]) == {atom("e"), atom("p")}


def test_derivable_closure_disjunction_adds_all_heads():
    rules = {GroundRule((atom("a"), atom("b")), ())}
    assert derivable_closure(rules) == {atom("a"), atom("b")}


# -- reduct and models ------------------------------------------------------------


def test_flp_reduct_keeps_exactly_body_true_rules():
    r1 = GroundRule((atom("a"),), (Literal(atom("b"), False),))  # a :- not b
    r2 = GroundRule((atom("b"),), (Literal(atom("a"), False),))  # b :- not a
    assert flp_reduct({r1, r2}, {atom("a")}) == {r1}
    assert flp_reduct({r1, r2}, set()) == {r1, r2}
    assert flp_reduct({r1, r2}, {atom("a"), atom("b")}) == set()


def test_is_model_requires_some_true_head():
    rule = GroundRule((atom("a"), atom("b")), (Literal(atom("c"), True),))
    assert is_model({rule}, set())  # body false
    assert is_model({rule}, {atom("c"), atom("a")})
    assert not is_model({rule}, {atom("c")})


def test_is_model_constraint_with_true_body_fails():
    constraint = GroundRule((), (Literal(atom("c"), True),))
    assert not is_model({constraint}, {atom("c")})
    assert is_model({constraint}, set())


# -- answer sets -------------------------------------------------------------------


def test_disjunctive_fact_has_two_answer_sets():
    assert families("a | b.") == {frozenset({"a"}), frozenset({"b"})}


def test_even_negation_cycle_has_two_answer_sets():
    assert families("a :- not b. b :- not a.") == {
        frozenset({"a"}),
        frozenset({"b"}),
    }


def test_self_support_is_not_support():
    assert families("p :- p.") == {frozenset()}


def test_constraint_prunes_answer_sets():
    assert families("a | b. :- a.") == {frozenset({"b"})}
    assert families("a | b. :- a. :- b.") == set()


def test_disjunction_with_mutual_propagation():
    # {a,b} is the unique answer set: each half forces the other
    assert families("a | b. a :- b. b :- a.") == {frozenset({"a", "b"})}


def test_minimality_prefers_smaller_disjunct():
    # both disjuncts satisfiable, but c makes {a} strictly smaller context
    assert families("a | b. a :- b.") == {frozenset({"a"})}


def test_odd_negation_cycle_has_no_answer_set():
    assert families("p :- not p.") == set()


def test_answer_sets_include_edb_facts():
    fams = families("e(a). p(X) :- e(X).")
    assert fams == {frozenset({"e(a)", "p(a)"})}


def test_two_node_colouring_has_six_answer_sets():
    text = (
        "node(a). node(b). edge(a,b).\n"
        "col(X,r) | col(X,g) | col(X,b) :- node(X).\n"
        ":- edge(X,Y), col(X,C), col(Y,C).\n"
    )
    fams = families(text)
    assert len(fams) == 6
    for family in fams:
        cols = sorted(a for a in family if a.startswith("col"))
        assert len(cols) == 2


def test_ground_answer_sets_on_prebuilt_rules():
    rules = {
        GroundRule((atom("p", "a"),), ()),
        GroundRule((atom("q", "a"),), (Literal(atom("p", "a"), True),)),
    }
    assert ground_answer_sets(rules) == {
        frozenset({atom("p", "a"), atom("q", "a")})
    }


def test_enum_cap_guard():
    rules = {
        GroundRule((atom("a"), atom("b")), ()),
        GroundRule((atom("c"), atom("d")), ()),
    }
    with pytest.raises(OracleCapError, match="interpretations"):
        ground_answer_sets(rules, cap=8)
    assert len(ground_answer_sets(rules, cap=16)) == 4


def test_answer_sets_respects_ground_cap():
    program = parse_program(
        "p(A,B,C,D,E) :- e(A), e(B), e(C), e(D), e(E). e(a). e(b). e(c)."
    )
    with pytest.raises(OracleCapError):
        answer_sets(program, ground_cap=100)


# -- equivalence checking ------------------------------------------------------------


def test_check_ans_equivalence_accepts_the_engine(four_node_colouring):
    program = parse_program(four_node_colouring)
    assert check_ans_equivalence(program, ground_program(program).pi)


def test_check_ans_equivalence_rejects_a_broken_grounding(four_node_colouring):
    program = parse_program(four_node_colouring)
    pi = set(ground_program(program).pi)
    # censoring the constraints changes the answer sets
    broken = {g for g in pi if not g.is_constraint}
    assert not check_ans_equivalence(program, broken)


def test_check_ans_equivalence_catches_missing_rules():
    program = parse_program("e(a). e(b). p(X) :- e(X).")
    pi = ground_program(program).pi
    assert check_ans_equivalence(program, pi)
    (dropped, _) = sorted(pi, key=str)
    assert not check_ans_equivalence(program, {dropped})


# -- properties ------------------------------------------------------------------------


ground_atoms = st.sampled_from([atom(n) for n in "pqrst"])


def definite_rules():
    body = st.lists(ground_atoms, max_size=3).map(
        lambda atoms: tuple(Literal(a, True) for a in atoms)
    )
    return st.builds(
        lambda h, b: GroundRule((h,), b), ground_atoms, body
    )


@given(st.sets(definite_rules(), max_size=8))
def test_definite_programs_have_the_closure_as_single_answer_set(rules):
    """For negation-free single-head programs the unique answer set is
    the least fixpoint."""
    closure = frozenset(derivable_closure(rules))
    assert ground_answer_sets(rules) == {closure}


def general_rules():
    literal = st.builds(Literal, ground_atoms, st.booleans())
    body = st.lists(literal, max_size=3).map(tuple)
    head = st.lists(ground_atoms, max_size=2, unique=True).map(tuple)
    return st.builds(GroundRule, head, body)


@given(st.sets(general_rules(), max_size=6))
def test_constraint_equals_negative_self_loop_encoding(rules):
    """A constraint ``:- B`` carries the same answer sets as the rule
    ``bad :- B, not bad`` with a fresh atom ``bad``."""
    constraints = {r for r in rules if r.is_constraint}
    proper = rules - constraints
    bad = atom("bad")
    encoded = proper | {
        GroundRule((bad,), r.body + (Literal(bad, False),))
        for r in constraints
    }
    left = ground_answer_sets(rules)
    right = ground_answer_sets(encoded)
    # 'bad' can never be in an answer set, so the families match as-is
    assert left == right


@given(st.sets(general_rules(), max_size=5))
def test_answer_sets_are_models_and_minimal(rules):
    for interpretation in ground_answer_sets(rules):
        reduct = flp_reduct(rules, interpretation)
        assert is_model(reduct, interpretation)
        assert is_model(rules, interpretation)


def test_fact_rules_round_trip():
    program = parse_program("e(a). e(b). p(X) :- e(X).")
    rules = naive_ground(program) | fact_rules(program.edb)
    fams = ground_answer_sets(rules)
    assert fams == {
        frozenset({atom("e", "a"), atom("e", "b"), atom("p", "a"), atom("p", "b")})
    }
