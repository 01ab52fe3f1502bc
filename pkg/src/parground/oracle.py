"""Brute-force reference semantics for desk-scale programs.

Everything here favours obviousness over speed: naive full grounding
by substitution enumeration, a least-fixpoint derivability closure,
the body-true reduct, and answer-set enumeration with an explicit
minimality check.  The grounder is tested against these functions, so
they deliberately share no code with the engine.

Hard caps guard every enumeration and raise :class:`OracleCapError`
instead of silently truncating: a reference implementation must never
return a wrong answer quietly.

Two domain restrictions keep enumeration feasible, neither losing an
answer set.  First, candidates only range over atoms that occur in
some rule head: an interpretation containing an atom that appears in
no head cannot be a minimal model of its reduct, because dropping
that atom never falsifies any rule head and therefore leaves a
smaller model.  Second, candidates stay inside the derivability
closure (negation ignored): for any model M of the reduct,
M ∩ closure is also a model — a reduct rule whose positive body lies
in M ∩ closure has all its head atoms in the closure by construction,
so the head atom it satisfies in M survives the intersection — hence
a minimal model never contains an atom outside the closure.  The
model and minimality checks themselves always run against the full,
unfiltered rule set.
"""
from __future__ import annotations

import itertools
from typing import Iterable

from .model import Atom, GroundRule, Program, Rule, fact_rules, substitute

DEFAULT_GROUND_CAP = 10**6
DEFAULT_ENUM_CAP = 2**20

# stand-in constant for programs that mention none at all
FRESH_CONSTANT = "psi"


class OracleCapError(RuntimeError):
    """An oracle enumeration would exceed its configured cap."""


def herbrand_universe(program: Program) -> list[str]:
    """All constants of the program, sorted; a single fresh constant
    when the program has none."""
    constants = program.constants()
    return sorted(constants) if constants else [FRESH_CONSTANT]


def herbrand_base_size(program: Program) -> int:
    universe = len(herbrand_universe(program))
    return sum(universe**arity for arity in program.arities.values())


def naive_ground(
    program: Program, cap: int = DEFAULT_GROUND_CAP
) -> set[GroundRule]:
    """Every ground instance of every retained rule: plain substitution
    of rule variables by universe constants, no derivability filtering.
    Facts of the extensional database are *not* included; callers
    reattach them via :func:`parground.model.fact_rules` when needed.
    """
    universe = herbrand_universe(program)
    per_rule: list[tuple[Rule, list[str]]] = []
    total = 0
    for rule in program.rules:
        variables = sorted(rule.variables())
        total += len(universe) ** len(variables)
        per_rule.append((rule, variables))
    if total > cap:
        raise OracleCapError(
            "naive grounding needs %d instances, cap is %d" % (total, cap)
        )
    out: set[GroundRule] = set()
    for rule, variables in per_rule:
        for values in itertools.product(universe, repeat=len(variables)):
            out.add(substitute(rule, dict(zip(variables, values))))
    return out


def derivable_closure(
    rules: Iterable[GroundRule], seed: Iterable[Atom] = ()
) -> set[Atom]:
    """Least fixpoint of "if all positive body atoms are derivable,
    every head atom is" over ``rules``, starting from ``seed``.

    Negative literals are ignored, making this the upper bound of
    atoms any answer set could contain; it is exactly the notion of
    derivability the grounder uses to filter rule instances.
    """
    derived = set(seed)
    rules = list(rules)
    changed = True
    while changed:
        changed = False
        for rule in rules:
            if not rule.head:
                continue
            if all(a in derived for a in rule.positive_body_atoms()):
                for atom in rule.head:
                    if atom not in derived:
                        derived.add(atom)
                        changed = True
    return derived


def oracle_ground(
    program: Program, cap: int = DEFAULT_GROUND_CAP
) -> set[GroundRule]:
    """The instances the grounder is expected to produce: naive
    grounding filtered to rules whose positive body atoms are all
    derivable (seeded with the extensional database)."""
    naive = naive_ground(program, cap)
    derived = derivable_closure(naive, program.edb)
    return {
        rule
        for rule in naive
        if all(a in derived for a in rule.positive_body_atoms())
    }


def _body_true(rule: GroundRule, interpretation: frozenset[Atom] | set[Atom]) -> bool:
    for literal in rule.body:
        if literal.positive != (literal.atom in interpretation):
            return False
    return True


def flp_reduct(
    rules: Iterable[GroundRule], interpretation: frozenset[Atom] | set[Atom]
) -> set[GroundRule]:
    """Keep exactly the rules whose whole body is true in the
    interpretation (positive atoms present, negated atoms absent)."""
    return {rule for rule in rules if _body_true(rule, interpretation)}


def is_model(
    rules: Iterable[GroundRule], interpretation: frozenset[Atom] | set[Atom]
) -> bool:
    """True iff every rule with a true body has a true head atom.
    A constraint with a true body always fails this."""
    for rule in rules:
        if _body_true(rule, interpretation) and not any(
            a in interpretation for a in rule.head
        ):
            return False
    return True


def ground_answer_sets(
    rules: Iterable[GroundRule], cap: int = DEFAULT_ENUM_CAP
) -> set[frozenset[Atom]]:
    """All answer sets of a ground program, by direct enumeration.

    An interpretation qualifies when it is a model of its own reduct
    and no proper subset is.  Candidates are built from derivable head
    atoms (see the module docstring for why that is exhaustive):
    single-atom facts are forced into every candidate, the remaining
    atoms toggle freely (2^k candidates, capped).
    """
    rules = set(rules)
    head_atoms: set[Atom] = set()
    forced: set[Atom] = set()
    for rule in rules:
        head_atoms.update(rule.head)
        if len(rule.head) == 1 and not rule.body:
            forced.add(rule.head[0])
    head_atoms &= derivable_closure(rules)
    free = sorted(head_atoms - forced, key=str)
    if len(free) >= cap.bit_length() and 2 ** len(free) > cap:
        raise OracleCapError(
            "answer-set search needs 2^%d interpretations, cap is %d"
            % (len(free), cap)
        )

    answers: set[frozenset[Atom]] = set()
    for k in range(len(free) + 1):
        for picked in itertools.combinations(free, k):
            interpretation = frozenset(forced) | frozenset(picked)
            reduct = flp_reduct(rules, interpretation)
            if not is_model(reduct, interpretation):
                continue
            if _has_smaller_model(reduct, interpretation, forced):
                continue
            answers.add(interpretation)
    return answers


def _has_smaller_model(
    reduct: set[GroundRule], interpretation: frozenset[Atom], forced: set[Atom]
) -> bool:
    """Does any proper subset of the interpretation model the reduct?
    Only subsets containing the forced atoms can (facts pin them), so
    the optional part alone is enumerated, smallest first."""
    optional = sorted(interpretation - forced, key=str)
    base = frozenset(forced)
    for k in range(len(optional)):
        for picked in itertools.combinations(optional, k):
            if is_model(reduct, base | frozenset(picked)):
                return True
    return False


def answer_sets(
    program: Program,
    ground_cap: int = DEFAULT_GROUND_CAP,
    enum_cap: int = DEFAULT_ENUM_CAP,
) -> set[frozenset[Atom]]:
    """Answer sets of a non-ground program: naive grounding plus the
    extensional facts, then ground enumeration."""
    rules = naive_ground(program, ground_cap) | fact_rules(program.edb)
    return ground_answer_sets(rules, enum_cap)


def check_ans_equivalence(
    program: Program,
    pi: Iterable[GroundRule],
    ground_cap: int = DEFAULT_GROUND_CAP,
    enum_cap: int = DEFAULT_ENUM_CAP,
) -> bool:
    """Does the produced ground program preserve the answer sets?

    Compares the answer sets of the original program (naive route)
    with those of ``pi`` re-joined with the extensional facts.
    """
    reference = answer_sets(program, ground_cap, enum_cap)
    produced = ground_answer_sets(
        set(pi) | fact_rules(program.edb), enum_cap
    )
    return reference == produced
