"""Bottom-up instantiation engine with three levels of parallelism.

The grounder evaluates the component DAG bottom-up.  Within a
component, exit rules run once, then recursive rules iterate
semi-naively: each pass joins against the atoms derived in the
previous pass (the delta) so no derivation is recomputed.  New head
atoms flow through the store's NS -> delta -> S pipeline; produced
ground rules accumulate in a shared, capped sink.

Work can be parallelized at three grains, each individually
switchable:

* ``c`` -- components whose dependencies are complete run concurrently;
* ``r`` -- within one evaluation pass, rules are grouped into batches
  by estimated cost and the batches run concurrently;
* ``s`` -- a single expensive rule is instantiated concurrently by
  partitioning the extension of one chosen body literal into virtual
  splits.

With one worker everything runs inline on the calling thread and the
pool is never created; results are identical either way, only the
schedule changes.

A rule is instantiated by nested-loop join with backtracking over its
ordered positive literals, using the store's hash indexes for bound
positions.  Negative literals never filter anything: they are carried
into the emitted ground rules verbatim, which preserves the answer
sets of the original program while sidestepping any need to reason
about negation during grounding.
"""
from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

from .depgraph import Component, compute_components
from .model import Atom, GroundProgram, GroundRule, Program, Rule, substitute
from .pool import BATCH_LANE, COMPONENT_LANE, SPLIT_LANE, WorkerPool
from .splitting import (
    VirtualSplit,
    explode_tail,
    select_split_literal,
    split_extension,
)
from .stats import OrderedBody, body_cost, order_body
from .store import BOTH_ROLE, DELTA_ROLE, ExtensionStore, S_ROLE

LEVEL_COMPONENTS = "c"
LEVEL_RULES = "r"
LEVEL_SPLITS = "s"
ALL_LEVELS = frozenset((LEVEL_COMPONENTS, LEVEL_RULES, LEVEL_SPLITS))

_CANCEL_CHECK_MASK = 0xFFF  # poll the cancel flag every 4096 join steps


class GroundingLimitError(RuntimeError):
    """The ground program outgrew the configured rule cap."""

    def __init__(self, limit: int):
        super().__init__(
            "ground program exceeds the configured cap of %d rules" % limit
        )
        self.limit = limit


def parse_levels(text: str) -> frozenset[str]:
    """Parse a levels flag: "c,r,s", "crs", "none" or "" -> level set."""
    cleaned = text.strip().lower()
    if cleaned in ("", "none"):
        return frozenset()
    letters = {part for part in cleaned.replace(",", "") if not part.isspace()}
    unknown = letters - ALL_LEVELS
    if unknown:
        raise ValueError(
            "unknown parallelism level(s): %s (choose from c, r, s)"
            % ",".join(sorted(unknown))
        )
    return frozenset(letters)


@dataclass(frozen=True, slots=True)
class SchedulerConfig:
    """Knobs governing parallel evaluation.

    ``workers`` is the thread count; ``levels`` enables the three
    parallelism grains.  A rule whose estimated work exceeds ``w_seq``
    is split into ``split_factor * workers`` tasks; beyond ``w_hard``
    the tail of those tasks is re-cut into single-atom splits for load
    balancing.  ``max_ground`` caps the emitted ground program.
    """

    workers: int = 1
    levels: frozenset[str] = ALL_LEVELS
    w_seq: int = 50_000
    w_hard: int = 5_000_000
    split_factor: int = 4
    max_ground: int = 10_000_000
    collect_stats: bool = False
    validate: bool = False

    def __post_init__(self):
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        if not (self.w_hard >= self.w_seq >= 0):
            raise ValueError("need w_hard >= w_seq >= 0")
        if self.split_factor < 1:
            raise ValueError("split_factor must be at least 1")
        if self.max_ground < 1:
            raise ValueError("max_ground must be positive")
        unknown = self.levels - ALL_LEVELS
        if unknown:
            raise ValueError("unknown levels: %s" % ",".join(sorted(unknown)))


def requested_splits(weight: int, config: SchedulerConfig) -> int:
    """Split count policy: cheap rules stay sequential, expensive ones
    are cut into a small multiple of the worker count."""
    if weight <= config.w_seq:
        return 1
    return config.split_factor * config.workers


def batch_rules(weights: Sequence[int], w_seq: int) -> list[list[int]]:
    """Greedily group rules (given by their weights, in order) into
    batches, closing a batch as soon as its accumulated weight exceeds
    the sequential threshold.  Returns index lists."""
    batches: list[list[int]] = []
    current: list[int] = []
    acc = 0
    for idx, weight in enumerate(weights):
        current.append(idx)
        acc += weight
        if acc > w_seq:
            batches.append(current)
            current = []
            acc = 0
    if current:
        batches.append(current)
    return batches


# --------------------------------------------------------------------------
# rule preparation: ordering, cost, compiled join plans


class _LiteralPlan:
    """Pre-computed join behaviour of one ordered positive literal.

    ``mask`` holds the argument positions that are fixed when the
    literal is reached (constants or variables bound earlier);
    ``key_sources`` says how to build the lookup key for them.
    ``new_positions`` binds fresh variables from a matching atom and
    ``dup_checks`` handles a fresh variable repeated within the same
    literal.
    """

    __slots__ = ("predicate", "mask", "key_sources", "new_positions", "dup_checks")

    def __init__(
        self,
        predicate: str,
        mask: tuple[int, ...],
        key_sources: tuple[tuple[bool, str], ...],
        new_positions: tuple[tuple[int, str], ...],
        dup_checks: tuple[tuple[int, int], ...],
    ):
        self.predicate = predicate
        self.mask = mask
        self.key_sources = key_sources
        self.new_positions = new_positions
        self.dup_checks = dup_checks

    def key(self, binding: dict[str, str]) -> tuple[str, ...]:
        return tuple(
            binding[name] if is_var else name
            for is_var, name in self.key_sources
        )


def _compile_plans(positives: Sequence) -> tuple[_LiteralPlan, ...]:
    bound: set[str] = set()
    plans: list[_LiteralPlan] = []
    for literal in positives:
        mask: list[int] = []
        sources: list[tuple[bool, str]] = []
        news: list[tuple[int, str]] = []
        dups: list[tuple[int, int]] = []
        first_at: dict[str, int] = {}
        for pos, term in enumerate(literal.atom.terms):
            if not term.is_variable:
                mask.append(pos)
                sources.append((False, term.name))
            elif term.name in bound:
                mask.append(pos)
                sources.append((True, term.name))
            elif term.name in first_at:
                dups.append((pos, first_at[term.name]))
            else:
                first_at[term.name] = pos
                news.append((pos, term.name))
        plans.append(
            _LiteralPlan(
                literal.atom.predicate,
                tuple(mask),
                tuple(sources),
                tuple(news),
                tuple(dups),
            )
        )
        bound.update(first_at)
    return tuple(plans)


@dataclass(frozen=True, slots=True)
class PreparedRule:
    """A rule frozen for one evaluation phase: ordered body, cost
    vector, compiled plans and the 1-based positions (in the ordered
    positive body) of its recursive literals."""

    rule: Rule
    ordered: OrderedBody
    plans: tuple[_LiteralPlan, ...]
    costs: CostVector
    weight: int
    recursive_positions: tuple[int, ...]


def prepare_rule(
    rule: Rule,
    store: ExtensionStore,
    recursive_preds: frozenset[str] = frozenset(),
) -> PreparedRule:
    """Order the body against current extension statistics and compile
    the join plans.  Re-run each iteration: statistics move."""
    ordered = order_body(rule, store)
    costs = body_cost(ordered.stats)
    recursive = tuple(
        i + 1
        for i, literal in enumerate(ordered.positives)
        if literal.atom.predicate in recursive_preds
    )
    return PreparedRule(
        rule=rule,
        ordered=ordered,
        plans=_compile_plans(ordered.positives),
        costs=costs,
        weight=costs.total,
        recursive_positions=recursive,
    )


def pass_role_vectors(prepared: PreparedRule) -> tuple[tuple[str, ...], ...]:
    """Role vectors (one per evaluation pass) for the positive body.

    A non-recursive rule gets a single pass with every literal reading
    the full extension.  A recursive rule with k recursive literals
    gets k passes; in pass j the j-th recursive literal reads the delta
    only, recursive literals left of it read the accumulated part only,
    and those right of it read both.  Every new derivation uses at
    least one delta atom and no instance is produced by two passes.
    """
    n = prepared.ordered.positive_count
    rec = prepared.recursive_positions
    if not rec:
        return ((BOTH_ROLE,) * n,)
    vectors: list[tuple[str, ...]] = []
    for j, pivot in enumerate(rec):
        roles = [BOTH_ROLE] * n
        for idx, position in enumerate(rec):
            if idx < j:
                roles[position - 1] = S_ROLE
            elif idx == j:
                roles[position - 1] = DELTA_ROLE
        vectors.append(tuple(roles))
    return tuple(vectors)


# --------------------------------------------------------------------------
# single-rule instantiation (nested-loop join with backtracking)


def _role_lengths(store: ExtensionStore, predicate: str, role: str) -> tuple[int, int]:
    if role == BOTH_ROLE:
        return store.s_len(predicate), store.d_len(predicate)
    if role == S_ROLE:
        return store.s_len(predicate), 0
    return 0, store.d_len(predicate)


def _candidates(
    plan: _LiteralPlan,
    role: str,
    binding: dict[str, str],
    store: ExtensionStore,
    split: VirtualSplit | None,
) -> Iterator[Atom]:
    if split is None:
        return store.lookup(plan.predicate, role, plan.mask, plan.key(binding))
    s_part = store.s_atoms(plan.predicate)[split.s_start : split.s_stop]
    d_part = store.d_atoms(plan.predicate)[split.d_start : split.d_stop]
    atoms = list(s_part) + list(d_part)
    if not plan.mask:
        return iter(atoms)
    key = plan.key(binding)
    mask = plan.mask
    return (
        atom
        for atom in atoms
        if all(atom.terms[p].name == key[i] for i, p in enumerate(mask))
    )


def instantiate_rule(
    prepared: PreparedRule,
    store: ExtensionStore,
    emit: Callable[[GroundRule], None],
    roles: Sequence[str] | None = None,
    split_index: int = 0,
    split: VirtualSplit | None = None,
    cancel: threading.Event | None = None,
) -> None:
    """Emit every ground instance of ``prepared`` whose positive body
    matches the store under ``roles`` (default: full extensions).

    When ``split_index`` is non-zero, the literal at that 1-based
    position of the ordered positive body ranges only over ``split``'s
    index ranges instead of its whole extension.
    """
    plans = prepared.plans
    n = len(plans)
    rule = prepared.rule
    if roles is None:
        roles = (BOTH_ROLE,) * n
    if n == 0:
        # Disjunctive facts and degenerate constraints: a safe rule
        # without positive body literals has no variables at all.
        if cancel is None or not cancel.is_set():
            emit(substitute(rule, {}))
        return

    binding: dict[str, str] = {}
    iters: list[Iterator[Atom]] = [iter(())] * n
    iters[0] = _candidates(
        plans[0], roles[0], binding, store, split if split_index == 1 else None
    )
    depth = 0
    steps = 0
    while depth >= 0:
        plan = plans[depth]
        for _pos, name in plan.new_positions:
            binding.pop(name, None)

        steps += 1
        if not steps & _CANCEL_CHECK_MASK and cancel is not None and cancel.is_set():
            return

        atom = None
        for candidate in iters[depth]:
            ok = True
            for pos, first in plan.dup_checks:
                if candidate.terms[pos].name != candidate.terms[first].name:
                    ok = False
                    break
            if ok:
                atom = candidate
                break
        if atom is None:
            depth -= 1
            continue

        for pos, name in plan.new_positions:
            binding[name] = atom.terms[pos].name
        if depth == n - 1:
            emit(substitute(rule, binding))
        else:
            depth += 1
            iters[depth] = _candidates(
                plans[depth],
                roles[depth],
                binding,
                store,
                split if split_index == depth + 1 else None,
            )


# --------------------------------------------------------------------------
# run statistics


@dataclass(slots=True)
class SplitDecision:
    rule_id: int
    phase: str
    iteration: int
    literal_index: int
    requested: int
    allowed: int
    cost: int | None
    shortcut: bool
    cost_table: tuple[tuple[int, int, int], ...]

    def to_dict(self) -> dict:
        return {
            "rule": self.rule_id,
            "phase": self.phase,
            "iteration": self.iteration,
            "literal_index": self.literal_index,
            "requested": self.requested,
            "allowed": self.allowed,
            "cost": self.cost,
            "shortcut": self.shortcut,
            "cost_table": [list(row) for row in self.cost_table],
        }


@dataclass(slots=True)
class RuleOrderRecord:
    """How one rule was set up for one evaluation phase: the chosen
    body order, the cost vector over that order and the per-literal
    size/distinct-count snapshots the ordering saw."""

    rule_id: int
    phase: str
    iteration: int
    order: tuple[str, ...]
    prefix_costs: tuple[int, ...]
    prefix_sizes: tuple[int, ...]
    literal_stats: tuple[dict, ...]

    def to_dict(self) -> dict:
        return {
            "rule": self.rule_id,
            "phase": self.phase,
            "iteration": self.iteration,
            "order": list(self.order),
            "prefix_costs": list(self.prefix_costs),
            "prefix_sizes": list(self.prefix_sizes),
            "literals": [dict(entry) for entry in self.literal_stats],
        }


def _order_record(
    prepared: PreparedRule, phase: str, iteration: int
) -> RuleOrderRecord:
    literal_stats = tuple(
        {
            "literal": str(literal),
            "size": stat.size,
            "distinct": dict(stat.distinct),
        }
        for literal, stat in zip(prepared.ordered.positives, prepared.ordered.stats)
    )
    return RuleOrderRecord(
        rule_id=prepared.rule.id,
        phase=phase,
        iteration=iteration,
        order=tuple(str(l) for l in prepared.ordered.literals),
        prefix_costs=tuple(prepared.costs.prefix_costs),
        prefix_sizes=tuple(prepared.costs.prefix_sizes),
        literal_stats=literal_stats,
    )


@dataclass(slots=True)
class ComponentRecord:
    component_id: int
    label: str
    iterations: int = 0
    wall_time: float = 0.0
    split_decisions: list[SplitDecision] = field(default_factory=list)
    rule_orders: list[RuleOrderRecord] = field(default_factory=list)

    def to_dict(self) -> dict:
        phase_key = lambda r: (r.phase != "exit", r.iteration, r.rule_id)
        return {
            "id": self.component_id,
            "label": self.label,
            "iterations": self.iterations,
            "wall_time": self.wall_time,
            "split_decisions": [
                d.to_dict() for d in sorted(self.split_decisions, key=phase_key)
            ],
            "rules": [
                r.to_dict() for r in sorted(self.rule_orders, key=phase_key)
            ],
        }


@dataclass(slots=True)
class RunStats:
    workers: int
    levels: str
    wall_time: float = 0.0
    ground_rules: int = 0
    components: list[ComponentRecord] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "workers": self.workers,
            "levels": self.levels,
            "wall_time": self.wall_time,
            "ground_rules": self.ground_rules,
            "components": [
                c.to_dict()
                for c in sorted(self.components, key=lambda c: c.component_id)
            ],
        }


@dataclass(slots=True)
class GroundResult:
    """Everything a grounding run produces."""

    pi: GroundProgram
    extensions: dict[str, frozenset[Atom]]
    components: tuple[Component, ...]
    stats: RunStats | None = None


# --------------------------------------------------------------------------
# the engine proper


class _PiSink:
    """Concurrent collector for produced ground rules, with a hard cap."""

    __slots__ = ("rules", "limit", "cancel", "_lock")

    def __init__(self, limit: int, cancel: threading.Event):
        self.rules: GroundProgram = set()
        self.limit = limit
        self.cancel = cancel
        self._lock = threading.Lock()

    def add(self, ground_rule: GroundRule) -> bool:
        with self._lock:
            if ground_rule in self.rules:
                return False
            if len(self.rules) >= self.limit:
                self.cancel.set()
                raise GroundingLimitError(self.limit)
            self.rules.add(ground_rule)
            return True


class _Engine:
    def __init__(self, program: Program, config: SchedulerConfig):
        self.program = program
        self.config = config
        self.components = compute_components(program)
        self.store = ExtensionStore()
        self.store.add_edb_atoms(program.edb)
        self.cancel = threading.Event()
        self.sink = _PiSink(config.max_ground, self.cancel)
        # with a single worker every level degenerates to inline execution
        self.levels = config.levels if config.workers > 1 else frozenset()
        self.pool: WorkerPool | None = (
            WorkerPool(config.workers) if self.levels else None
        )
        self.collecting = config.collect_stats
        self._records: list[ComponentRecord] = []
        self._records_lock = threading.Lock()

    # -- emission -------------------------------------------------------

    def _emit(self, ground_rule: GroundRule) -> None:
        if self.sink.add(ground_rule):
            for atom in ground_rule.head:
                self.store.try_add_ns(atom)

    # -- one (rule, pass, split) job -------------------------------------

    def _run_job(
        self,
        prepared: PreparedRule,
        roles: tuple[str, ...],
        split_index: int,
        split: VirtualSplit | None,
    ) -> None:
        if self.cancel.is_set():
            return
        instantiate_rule(
            prepared,
            self.store,
            self._emit,
            roles=roles,
            split_index=split_index,
            split=split,
            cancel=self.cancel,
        )

    def _run_batch(
        self, jobs: Sequence[tuple[PreparedRule, tuple[str, ...]]]
    ) -> None:
        for prepared, roles in jobs:
            self._run_job(prepared, roles, 0, None)

    # -- phase execution --------------------------------------------------

    def _run_phase(
        self,
        prepared_rules: Sequence[PreparedRule],
        phase: str,
        iteration: int,
        record: ComponentRecord | None,
    ) -> None:
        """Evaluate one parallel pass (all rules of a phase) and barrier."""
        split_jobs: list[tuple[PreparedRule, tuple[str, ...], int, VirtualSplit]] = []
        light: list[PreparedRule] = []

        if record is not None:
            for prepared in prepared_rules:
                record.rule_orders.append(_order_record(prepared, phase, iteration))

        for prepared in prepared_rules:
            request = requested_splits(prepared.weight, self.config)
            if (
                LEVEL_SPLITS in self.levels
                and request > 1
                and prepared.ordered.positive_count > 0
            ):
                choice = select_split_literal(
                    prepared.costs, prepared.ordered.stats, request
                )
                assert choice is not None
                if record is not None:
                    record.split_decisions.append(
                        SplitDecision(
                            rule_id=prepared.rule.id,
                            phase=phase,
                            iteration=iteration,
                            literal_index=choice.index,
                            requested=choice.requested,
                            allowed=choice.allowed,
                            cost=choice.cost,
                            shortcut=choice.shortcut,
                            cost_table=choice.cost_table,
                        )
                    )
                predicate = prepared.plans[choice.index - 1].predicate
                for roles in pass_role_vectors(prepared):
                    s_len, d_len = _role_lengths(
                        self.store, predicate, roles[choice.index - 1]
                    )
                    splits = split_extension(s_len, d_len, request)
                    if prepared.weight > self.config.w_hard:
                        splits = explode_tail(splits, keep=self.config.workers)
                    split_jobs.extend(
                        (prepared, roles, choice.index, vs) for vs in splits
                    )
            else:
                light.append(prepared)

        light_jobs = [
            (prepared, roles)
            for prepared in light
            for roles in pass_role_vectors(prepared)
        ]

        if not self.pool or not (split_jobs or LEVEL_RULES in self.levels):
            # fully inline: deterministic rule-order evaluation
            for prepared, roles, index, vs in split_jobs:
                self._run_job(prepared, roles, index, vs)
            self._run_batch(light_jobs)
            return

        group = self.pool.group()
        for prepared, roles, index, vs in split_jobs:
            group.submit(SPLIT_LANE, self._run_job, prepared, roles, index, vs)
        if LEVEL_RULES in self.levels and light:
            jobs_of_rule: dict[int, list] = {}
            for prepared, roles in light_jobs:
                jobs_of_rule.setdefault(id(prepared), []).append((prepared, roles))
            batches = batch_rules([p.weight for p in light], self.config.w_seq)
            for batch in batches:
                jobs: list[tuple[PreparedRule, tuple[str, ...]]] = []
                for idx in batch:
                    jobs.extend(jobs_of_rule[id(light[idx])])
                group.submit(BATCH_LANE, self._run_batch, jobs)
        else:
            self._run_batch(light_jobs)
        group.wait()

    # -- component evaluation ----------------------------------------------

    def evaluate_component(self, component: Component) -> None:
        started = time.perf_counter()
        record = (
            ComponentRecord(component.id, component.label)
            if self.collecting
            else None
        )
        preds = component.predicates

        if component.exit_rules:
            prepared = [
                prepare_rule(rule, self.store) for rule in component.exit_rules
            ]
            self._run_phase(prepared, "exit", 0, record)

        iterations = 0
        if component.recursive_rules:
            recursive = frozenset(preds)
            while self.store.ns_nonempty(preds):
                self.store.shift_ns_to_delta(preds)
                iterations += 1
                prepared = [
                    prepare_rule(rule, self.store, recursive)
                    for rule in component.recursive_rules
                ]
                self._run_phase(prepared, "recursive", iterations, record)
                self.store.merge_delta_into_s(preds)
                if self.config.validate:
                    self.store.check_consistency()
        elif self.store.ns_nonempty(preds):
            # nothing iterates, but derived atoms still travel the
            # NS -> delta -> S road so role invariants stay intact
            self.store.shift_ns_to_delta(preds)
            self.store.merge_delta_into_s(preds)

        if record is not None:
            record.iterations = iterations
            record.wall_time = time.perf_counter() - started
            with self._records_lock:
                self._records.append(record)

    # -- whole-program run ---------------------------------------------------

    def _run_components_parallel(self) -> None:
        assert self.pool is not None
        group = self.pool.group()
        lock = threading.Lock()
        done: set[int] = set()
        submitted: set[int] = set()

        def submit_ready_locked() -> None:
            for component in self.components:
                if component.id in submitted:
                    continue
                if component.depends_on <= done:
                    submitted.add(component.id)
                    group.submit(COMPONENT_LANE, run_one, component)

        def run_one(component: Component) -> None:
            if self.cancel.is_set():
                return
            try:
                self.evaluate_component(component)
            except BaseException:
                self.cancel.set()
                raise
            with lock:
                done.add(component.id)
                submit_ready_locked()

        with lock:
            submit_ready_locked()
        group.wait()

    def run(self) -> GroundResult:
        started = time.perf_counter()
        try:
            if LEVEL_COMPONENTS in self.levels and self.pool is not None:
                self._run_components_parallel()
            else:
                for component in self.components:
                    self.evaluate_component(component)
        finally:
            if self.pool is not None:
                self.pool.shutdown()

        if self.config.validate:
            self.store.check_consistency()
        extensions = self.store.final_extensions()
        stats = None
        if self.collecting:
            stats = RunStats(
                workers=self.config.workers,
                levels="".join(sorted(self.config.levels)),
                wall_time=time.perf_counter() - started,
                ground_rules=len(self.sink.rules),
                components=sorted(
                    self._records, key=lambda r: r.component_id
                ),
            )
        return GroundResult(
            pi=self.sink.rules,
            extensions=extensions,
            components=self.components,
            stats=stats,
        )


def ground_program(
    program: Program, config: SchedulerConfig | None = None
) -> GroundResult:
    """Ground ``program``: compute the derivable extensions bottom-up
    and return every rule instance whose positive body is derivable.
    The produced rule set and extensions do not depend on the worker
    count or on which parallelism levels are enabled."""
    return _Engine(program, config or SchedulerConfig()).run()
