"""Parser and renderer for the rule language.

The accepted syntax, in short::

    % line comment
    node(a).                          % fact
    col(X,red) | col(X,green) :- node(X).
    :- edge(X,Y), col(X,C), col(Y,C). % constraint

Identifiers starting with a lowercase letter are constants/predicate
names, identifiers starting with an uppercase letter are variables, and
unsigned integers are constants.  ``|`` separates head atoms; a bare
``v`` surrounded by whitespace is accepted as an alias.  ``not`` is a
reserved keyword and cannot be used as a predicate or constant name.

Errors are reported as ``file:line:col: message`` and distinguish plain
syntax errors, arity mismatches (predicate identity is name *and*
arity) and safety violations.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

from .model import (
    Atom,
    GroundRule,
    Literal,
    Program,
    Rule,
    Term,
    check_safety,
    classify_predicates,
)


class ParseError(Exception):
    """Base class for everything the parser can reject."""

    def __init__(self, message: str, filename: str, line: int, col: int):
        super().__init__(message)
        self.message = message
        self.filename = filename
        self.line = line
        self.col = col

    def __str__(self) -> str:
        return "%s:%d:%d: %s" % (self.filename, self.line, self.col, self.message)


class SyntaxParseError(ParseError):
    pass


class ArityError(ParseError):
    """The same predicate name used with two different arities."""


class SafetyError(ParseError):
    """A rule variable that no positive body literal binds."""

    def __init__(self, message, filename, line, col, rule_index, variable):
        super().__init__(message, filename, line, col)
        self.rule_index = rule_index
        self.variable = variable


_TOKEN_RE = re.compile(
    r"""
      (?P<WS>\s+)
    | (?P<COMMENT>%[^\n]*)
    | (?P<IF>:-)
    | (?P<LPAREN>\()
    | (?P<RPAREN>\))
    | (?P<COMMA>,)
    | (?P<PERIOD>\.)
    | (?P<PIPE>\|)
    | (?P<INT>\d+)
    | (?P<NAME>[a-z][A-Za-z0-9_]*)
    | (?P<VAR>[A-Z][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True, slots=True)
class _Token:
    type: str
    text: str
    line: int
    col: int
    start: int  # offset into the source, for whitespace-sensitive checks


def _tokenize(text: str, filename: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos, line, line_start = 0, 1, 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise SyntaxParseError(
                "unexpected character %r" % text[pos], filename, line, pos - line_start + 1
            )
        kind = m.lastgroup or ""
        value = m.group()
        if kind not in ("WS", "COMMENT"):
            tok_type = kind
            if kind == "NAME" and value == "not":
                tok_type = "NOT"
            tokens.append(_Token(tok_type, value, line, pos - line_start + 1, pos))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = pos + value.rfind("\n") + 1
        pos = m.end()
    tokens.append(_Token("EOF", "", line, n - line_start + 1, n))
    return tokens


class _Parser:
    def __init__(self, text: str, filename: str):
        self.text = text
        self.filename = filename
        self.tokens = _tokenize(text, filename)
        self.i = 0

    # -- token plumbing ------------------------------------------------

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, tok_type: str, what: str) -> _Token:
        tok = self.peek()
        if tok.type != tok_type:
            self.fail("expected %s, found %r" % (what, tok.text or "end of input"), tok)
        return self.next()

    def fail(self, message: str, tok: _Token):
        raise SyntaxParseError(message, self.filename, tok.line, tok.col)

    def _is_head_disjunction_alias(self, tok: _Token) -> bool:
        # A lone `v` doubles as the disjunction separator, but only when it
        # is surrounded by whitespace (otherwise it is an ordinary name).
        if tok.type != "NAME" or tok.text != "v":
            return False
        before = self.text[tok.start - 1] if tok.start > 0 else " "
        after_idx = tok.start + 1
        after = self.text[after_idx] if after_idx < len(self.text) else " "
        return before.isspace() and after.isspace()

    # -- grammar -------------------------------------------------------

    def parse_statements(self) -> list[tuple[tuple[Atom, ...], tuple[Literal, ...], _Token]]:
        statements = []
        while self.peek().type != "EOF":
            statements.append(self.statement())
        return statements

    def statement(self):
        start = self.peek()
        head: tuple[Atom, ...] = ()
        body: tuple[Literal, ...] = ()
        if self.peek().type == "IF":
            self.next()
            body = self.body()
        else:
            head = self.head()
            if self.peek().type == "IF":
                self.next()
                body = self.body()
        self.expect("PERIOD", "'.'")
        return head, body, start

    def head(self) -> tuple[Atom, ...]:
        atoms = [self.atom()]
        while True:
            tok = self.peek()
            if tok.type == "PIPE" or self._is_head_disjunction_alias(tok):
                self.next()
                atoms.append(self.atom())
            else:
                return tuple(atoms)

    def body(self) -> tuple[Literal, ...]:
        literals = [self.literal()]
        while self.peek().type == "COMMA":
            self.next()
            literals.append(self.literal())
        return tuple(literals)

    def literal(self) -> Literal:
        if self.peek().type == "NOT":
            self.next()
            return Literal(self.atom(), positive=False)
        return Literal(self.atom())

    def atom(self) -> Atom:
        name = self.expect("NAME", "a predicate name")
        if self.peek().type != "LPAREN":
            return Atom(name.text)
        self.next()
        terms = [self.term()]
        while self.peek().type == "COMMA":
            self.next()
            terms.append(self.term())
        self.expect("RPAREN", "')'")
        return Atom(name.text, tuple(terms))

    def term(self) -> Term:
        tok = self.peek()
        if tok.type in ("NAME", "VAR", "INT"):
            self.next()
            return Term(tok.text)
        self.fail("expected a term, found %r" % (tok.text or "end of input"), tok)
        raise AssertionError  # unreachable


def parse_program(text: str, filename: str = "<string>") -> Program:
    """Parse program text into a :class:`Program`.

    Performs, in order: syntax analysis, arity consistency checks (the
    same name may not be used with two arities), safety checks, and
    EDB/IDB classification (facts over EDB predicates move into the
    extensional database, everything else keeps a rule id in input
    order).
    """
    statements = _Parser(text, filename).parse_statements()

    arities: dict[str, int] = {}

    def note_arity(atom: Atom, tok: _Token):
        seen = arities.get(atom.predicate)
        if seen is None:
            arities[atom.predicate] = atom.arity
        elif seen != atom.arity:
            raise ArityError(
                "arity mismatch for predicate '%s': used with %d and %d arguments"
                % (atom.predicate, seen, atom.arity),
                filename,
                tok.line,
                tok.col,
            )

    raw_rules: list[Rule] = []
    spans: list[_Token] = []
    for index, (head, body, tok) in enumerate(statements):
        for a in head:
            note_arity(a, tok)
        for l in body:
            note_arity(l.atom, tok)
        rule = Rule(head, body)
        offender = check_safety(rule)
        if offender is not None:
            raise SafetyError(
                "unsafe rule %d: variable '%s' does not occur in any positive body literal"
                % (index, offender),
                filename,
                tok.line,
                tok.col,
                rule_index=index,
                variable=offender,
            )
        raw_rules.append(rule)
        spans.append(tok)

    edb_preds, idb_preds = classify_predicates(raw_rules)

    edb: list[Atom] = []
    edb_seen: set[Atom] = set()
    kept: list[Rule] = []
    for rule in raw_rules:
        if rule.is_fact and rule.head[0].predicate in edb_preds:
            atom = rule.head[0]
            if atom not in edb_seen:
                edb_seen.add(atom)
                edb.append(atom)
        else:
            kept.append(rule)

    rules = tuple(
        Rule(r.head, r.body, id=i) for i, r in enumerate(kept)
    )
    return Program(
        rules=rules,
        edb=tuple(edb),
        idb_predicates=frozenset(idb_preds),
        arities=arities,
    )


# -- rendering ----------------------------------------------------------


def render_rule(rule: Rule | GroundRule) -> str:
    return str(rule)


def render_ground_program(pi: Iterable[GroundRule], edb: Iterable[Atom] = ()) -> str:
    """Canonical text for a ground program: one rule per line, the lines
    sorted lexicographically, byte-identical for equal rule/fact sets.

    ``edb`` atoms, when given, are rendered as facts alongside the
    rules.  The empty program renders as the empty string.
    """
    lines = {str(r) for r in pi}
    lines.update("%s." % a for a in edb)
    if not lines:
        return ""
    return "\n".join(sorted(lines)) + "\n"
