"""Core syntax objects for disjunctive logic programs.

Terms, atoms, literals, rules and programs, plus the structural helpers
everything else builds on: rule safety, EDB/IDB classification and
ground substitution.  All objects are immutable and hashable so that
ground programs can live in plain sets.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence


@dataclass(frozen=True, slots=True)
class Term:
    """A constant or a variable; the lexical convention decides which.

    Names starting with an uppercase letter are variables, everything
    else (lowercase-initial identifiers and unsigned integers) is a
    constant.  Because the two name spaces are disjoint, equality of
    terms is just equality of names.
    """

    name: str

    @property
    def is_variable(self) -> bool:
        return self.name[:1].isupper()

    @property
    def kind(self) -> str:
        return "variable" if self.is_variable else "constant"

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Atom:
    """A predicate applied to a (possibly empty) tuple of terms."""

    predicate: str
    terms: tuple[Term, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.terms)

    @property
    def is_ground(self) -> bool:
        return not any(t.is_variable for t in self.terms)

    def variables(self) -> Iterator[str]:
        for t in self.terms:
            if t.is_variable:
                yield t.name

    def __str__(self) -> str:
        if not self.terms:
            return self.predicate
        return "%s(%s)" % (self.predicate, ",".join(t.name for t in self.terms))


@dataclass(frozen=True, slots=True)
class Literal:
    """An atom, possibly under default negation."""

    atom: Atom
    positive: bool = True

    def __str__(self) -> str:
        return str(self.atom) if self.positive else "not %s" % self.atom


@dataclass(frozen=True, slots=True)
class Rule:
    """A disjunctive rule ``h1 | ... | hn :- b1, ..., bm.``

    An empty head makes the rule an integrity constraint; an empty body
    with a single head atom makes it a fact.  ``id`` is the stable
    position of the rule in the program (input order) and is excluded
    from nothing: two textually equal rules at different positions are
    distinct rules.
    """

    head: tuple[Atom, ...]
    body: tuple[Literal, ...]
    id: int = -1

    @property
    def is_constraint(self) -> bool:
        return not self.head

    @property
    def is_fact(self) -> bool:
        # Only normal rules (exactly one head atom) qualify; an empty-body
        # disjunctive rule is still a proper rule and its predicates stay IDB.
        return len(self.head) == 1 and not self.body

    def head_predicates(self) -> set[str]:
        return {a.predicate for a in self.head}

    def positive_body(self) -> tuple[Literal, ...]:
        return tuple(l for l in self.body if l.positive)

    def negative_body(self) -> tuple[Literal, ...]:
        return tuple(l for l in self.body if not l.positive)

    def variables(self) -> set[str]:
        out: set[str] = set()
        for a in self.head:
            out.update(a.variables())
        for l in self.body:
            out.update(l.atom.variables())
        return out

    def __str__(self) -> str:
        head = " | ".join(str(a) for a in self.head)
        if not self.body:
            return "%s." % head
        body = ", ".join(str(l) for l in self.body)
        if not self.head:
            return ":- %s." % body
        return "%s :- %s." % (head, body)


@dataclass(frozen=True, slots=True)
class GroundRule:
    """A rule instance in which every term is a constant.

    Unlike :class:`Rule` it carries no id: ground programs have set
    semantics, so two structurally equal instances are the same rule no
    matter which rules or passes produced them.
    """

    head: tuple[Atom, ...]
    body: tuple[Literal, ...]

    @property
    def is_constraint(self) -> bool:
        return not self.head

    def positive_body_atoms(self) -> Iterator[Atom]:
        for l in self.body:
            if l.positive:
                yield l.atom

    def __str__(self) -> str:
        head = " | ".join(str(a) for a in self.head)
        if not self.body:
            return "%s." % head
        body = ", ".join(str(l) for l in self.body)
        if not self.head:
            return ":- %s." % body
        return "%s :- %s." % (head, body)


# A ground program is nothing more than a set of ground rules.
GroundProgram = set[GroundRule]


@dataclass(slots=True)
class Program:
    """A parsed program: retained rules plus the extensional database.

    ``rules`` holds every non-fact rule and every fact over an IDB
    predicate, ids assigned in input order.  ``edb`` holds the facts of
    EDB predicates as ground atoms, deduplicated but in input order:
    downstream extension stores index tuples positionally, so the order
    facts arrived in is part of the observable contract.
    """

    rules: tuple[Rule, ...]
    edb: tuple[Atom, ...]
    idb_predicates: frozenset[str]
    arities: dict[str, int] = field(default_factory=dict)

    @property
    def edb_predicates(self) -> frozenset[str]:
        preds = set(self.arities) if self.arities else self._mentioned()
        return frozenset(preds - self.idb_predicates)

    def _mentioned(self) -> set[str]:
        preds = {a.predicate for a in self.edb}
        for r in self.rules:
            preds.update(r.head_predicates())
            preds.update(l.atom.predicate for l in r.body)
        return preds

    def constants(self) -> set[str]:
        out: set[str] = set()
        for a in self.edb:
            out.update(t.name for t in a.terms)
        for r in self.rules:
            for a in r.head:
                out.update(t.name for t in a.terms if not t.is_variable)
            for l in r.body:
                out.update(t.name for t in l.atom.terms if not t.is_variable)
        return out


def check_safety(rule: Rule) -> str | None:
    """Return the first unsafe variable of ``rule`` in textual order.

    A rule is safe when every variable occurring anywhere in it occurs
    in at least one positive body literal.  The scan order is: head
    atoms left to right, then body literals left to right, terms left
    to right within each atom.  Returns ``None`` for a safe rule.
    """
    bound = {v for l in rule.body if l.positive for v in l.atom.variables()}
    for atom in rule.head:
        for v in atom.variables():
            if v not in bound:
                return v
    for literal in rule.body:
        for v in literal.atom.variables():
            if v not in bound:
                return v
    return None


def classify_predicates(rules: Sequence[Rule]) -> tuple[set[str], set[str]]:
    """Partition the predicates mentioned by ``rules`` into (EDB, IDB).

    A predicate is extensional iff every rule with that predicate in
    its head is a fact; notably a predicate that never occurs in any
    head is extensional with an (initially) empty extension.
    """
    idb: set[str] = set()
    mentioned: set[str] = set()
    for r in rules:
        mentioned.update(r.head_predicates())
        mentioned.update(l.atom.predicate for l in r.body)
        if not r.is_fact:
            idb.update(r.head_predicates())
    return mentioned - idb, idb


def substitute_atom(atom: Atom, binding: Mapping[str, str]) -> Atom:
    """Apply a variable-to-constant binding to one atom."""
    if not atom.terms:
        return atom
    try:
        terms = tuple(
            Term(binding[t.name]) if t.is_variable else t for t in atom.terms
        )
    except KeyError as exc:
        raise ValueError(
            "unbound variable %s in %s" % (exc.args[0], atom)
        ) from None
    return Atom(atom.predicate, terms)


def substitute(rule: Rule, binding: Mapping[str, str]) -> GroundRule:
    """Instantiate ``rule`` under ``binding`` (must cover all its variables)."""
    head = tuple(substitute_atom(a, binding) for a in rule.head)
    body = tuple(
        Literal(substitute_atom(l.atom, binding), l.positive) for l in rule.body
    )
    return GroundRule(head, body)


def fact_rules(atoms: Iterable[Atom]) -> set[GroundRule]:
    """View a collection of ground atoms as empty-body ground rules."""
    return {GroundRule((a,), ()) for a in atoms}
