"""Parallel grounder for disjunctive logic programs.

The package turns a non-ground program with variables into an
equivalent ground program while preserving its answer sets.  Work is
parallelised at three grain sizes — strongly connected components of
the predicate dependency graph, batches of rules inside a component,
and splits of a single rule's instantiation space — with a cost model
deciding how finely to cut.

Typical library use::

    from parground import parse_program, ground_program, SchedulerConfig

    program = parse_program(text)
    result = ground_program(program, SchedulerConfig(workers=4))
    print(len(result.pi), "ground rules")
"""
from .depgraph import Component, compute_components, dot_condensation
from .engine import (
    ALL_LEVELS,
    GroundingLimitError,
    GroundResult,
    SchedulerConfig,
    ground_program,
    parse_levels,
)
from .generators import generate_instance
from .model import Atom, GroundRule, Literal, Program, Rule, Term
from .oracle import OracleCapError, answer_sets, check_ans_equivalence
from .parser import (
    ArityError,
    ParseError,
    SafetyError,
    SyntaxParseError,
    parse_program,
    render_ground_program,
    render_rule,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_LEVELS",
    "ArityError",
    "Atom",
    "Component",
    "GroundResult",
    "GroundRule",
    "GroundingLimitError",
    "Literal",
    "OracleCapError",
    "ParseError",
    "Program",
    "Rule",
    "SafetyError",
    "SchedulerConfig",
    "SyntaxParseError",
    "Term",
    "answer_sets",
    "check_ans_equivalence",
    "compute_components",
    "dot_condensation",
    "generate_instance",
    "ground_program",
    "parse_levels",
    "parse_program",
    "render_ground_program",
    "render_rule",
    "__version__",
]
