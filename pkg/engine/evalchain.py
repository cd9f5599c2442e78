"""
Evaluation of programs split into a list of units.

A unit may only use predicates that it or an earlier unit defines. Units
are solved one after the other: every answer set of a unit becomes the
input facts of the next one. With trans-unit propagation an inconsistent
unit is analyzed over the atoms of its predecessors and the resulting
constraint is pushed to the earliest unit that can check it.
"""

import logging
from dataclasses import dataclass, field
from functools import partial
from itertools import chain as iter_chain, combinations

from .ast import InconsistencyReason, Program, atom_key
from .cdnl import Solver, solve_all
from .exceptions import ChainError, UnsupportedProgram
from .externals import registry_for
from .grounder import Instantiator, ground_program
from .increason import analyze_inconsistency
from .limits import get_limits

logger = logging.getLogger(__name__)

MODES = ('monolithic', 'splitting', 'tuprop')
# command-line spellings
MODE_ALIASES = {'monolithic': 'monolithic', 'split': 'splitting', 'splitting': 'splitting', 'tuprop': 'tuprop'}


@dataclass
class UnitCounters:
    groundings: int = 0
    solves: int = 0
    conflicts: int = 0
    learned: int = 0


@dataclass
class EvaluationChain:
    """
    Units in evaluation order. ``defined_atoms``, ``learned_constraints`` and
    ``counters`` are filled while the chain is evaluated.
    """

    units: tuple
    defined_atoms: list = field(default_factory=list)
    learned_constraints: list = field(default_factory=list)
    counters: list = field(default_factory=list)

    def __post_init__(self):
        self.units = tuple(self.units)
        if not self.defined_atoms:
            self.reset()

    def __len__(self):
        return len(self.units)

    def reset(self):
        size = len(self.units)
        self.defined_atoms = [set() for _ in range(size)]
        self.learned_constraints = [[] for _ in range(size)]
        self.counters = [UnitCounters() for _ in range(size)]

    def unit_program(self, index):
        return self.units[index].extend(self.learned_constraints[index])

    def domain_before(self, index, facts=()):
        """Input facts plus every atom defined by a unit before ``index``."""
        found = set(facts)
        for defined in self.defined_atoms[:index]:
            found |= defined
        return frozenset(found)

    def host_of(self, constraint, facts=()):
        """Earliest unit whose prefix defines all atoms of the constraint."""
        atoms = set(constraint.positive_atoms) | set(constraint.negative_atoms)
        for index in range(len(self.units)):
            if atoms <= self.domain_before(index + 1, facts):
                return index
        raise ChainError(f"no unit defines all atoms of '{constraint}'")

    def install(self, reason, facts=()):
        """Add the constraint of an inconsistency reason; returns the host unit or None for duplicates."""
        constraint = reason.as_constraint()
        host = self.host_of(constraint, facts)
        if constraint in self.learned_constraints[host]:
            return None
        self.learned_constraints[host].append(constraint)
        self.counters[host].learned += 1
        logger.debug("learned '%s' in unit %d", constraint, host)
        return host


@dataclass(frozen=True)
class ChainResult:
    mode: str
    answer_sets: frozenset
    counters: tuple
    learned: tuple = ()

    def column(self, name):
        return '/'.join(str(getattr(c, name)) for c in self.counters)

    def total(self, name):
        return sum(getattr(c, name) for c in self.counters)


def _body_predicates(rule):
    found = {a.predicate for a in rule.positive_atoms} | {a.predicate for a in rule.negative_atoms}
    for literal in rule.body:
        if literal.kind == 'external':
            found.update(literal.payload.input_predicates)
        elif literal.kind == 'conditional':
            cond = literal.payload
            found.add(cond.condition.predicate)
            if cond.template.kind == 'ordinary':
                found.add(cond.template.payload.predicate)
    return found


def _head_predicates(program):
    return {a.predicate for r in program.rules for a in r.head}


def _used_predicates(program):
    found = _head_predicates(program)
    for rule in program.rules:
        found |= _body_predicates(rule)
    return found


def _invents_nonmonotonically(rule, registry):
    for literal in rule.body:
        if literal.kind != 'external' or literal.payload.is_ground:
            continue
        decl = registry.get(literal.payload.name)
        if not literal.positive or not all(decl.monotone):
            return True
    return False


def validate_chain(chain):
    """Later units must not define predicates that earlier units use."""
    for j, later in enumerate(chain.units):
        defined = _head_predicates(later)
        for i, earlier in enumerate(chain.units[:j]):
            clash = defined & _used_predicates(earlier)
            if clash:
                raise ChainError(
                    f"unit {j} defines {', '.join(sorted(clash))} which unit {i} already uses"
                )
    return chain


def split_program(program, registry=None):
    """Units from the #split markers, or a cut before the first nonmonotonic value-inventing rule."""
    if program.has_queries:
        raise UnsupportedProgram("rewrite query atoms before splitting a program")
    rules = program.rules
    cuts = list(program.unit_markers)
    if not cuts:
        registry = registry_for(program, registry)
        for position, rule in enumerate(rules):
            if _invents_nonmonotonically(rule, registry):
                if position > 0:
                    cuts.append(position)
                break
    bounds = [0] + cuts + [len(rules)]
    units = [
        program.with_rules(rules[start:end])
        for start, end in zip(bounds, bounds[1:])
        if end > start
    ]
    if not units:
        units = [program.with_rules(())]
    logger.debug("split %d rules into %d units", len(rules), len(units))
    return validate_chain(EvaluationChain(tuple(units)))


def flatten(chain):
    """The units (and their learned constraints) as one program again."""
    program = Program()
    for index in range(len(chain)):
        program = program.union(chain.unit_program(index))
    return program


class ChainEvaluation:
    """One run of ``evaluate_chain``; holds the live solver of every unit on the current path."""

    def __init__(self, chain, facts=(), mode='splitting', registry=None, limits=None):
        if mode not in MODES:
            raise ValueError(f"mode must be one of {', '.join(MODES)}")
        self.chain = chain
        self.facts = frozenset(facts)
        self.mode = mode
        self.registry = registry
        self.limits = limits or get_limits()
        self.answer_sets = set()
        self._solvers = [None] * len(chain)
        self._grounds = [None] * len(chain)
        self._cut = None

    @property
    def propagating(self):
        return self.mode == 'tuprop'

    def run(self):
        self.chain.reset()
        if self.mode == 'monolithic':
            self._monolithic()
        else:
            self._evaluate(0, self.facts)
        learned = tuple(
            (index, rule)
            for index, rules in enumerate(self.chain.learned_constraints)
            for rule in rules
        )
        result = ChainResult(
            self.mode,
            frozenset(self.answer_sets),
            tuple(self.chain.counters),
            learned,
        )
        logger.info(
            "%s evaluation: %d answer sets, solves %s, %d learned constraints",
            self.mode, len(result.answer_sets), result.column('solves'), len(learned),
        )
        return result

    def _monolithic(self):
        counters = self.chain.counters[0]
        ground = ground_program(flatten(self.chain), self.facts, registry=self.registry, limits=self.limits)
        counters.groundings += 1
        solver = Solver(ground, registry=self.registry, limits=self.limits)
        counters.solves += 1
        for outcome in solver.answer_sets():
            self.answer_sets.add(outcome.answer_set)
        counters.conflicts += solver.stats.conflicts

    def _record_defined(self, index, ground, facts):
        defined = {a for r in ground.rules for a in r.head if not a.is_auxiliary} - set(facts)
        self.chain.defined_atoms[index] |= defined

    def ground_unit(self, index, facts):
        """
        Splitting grounds a unit for the actual input. Propagation grounds it
        once for every input over the predecessors' atoms, so that its
        inconsistency reasons hold for all inputs.
        """
        counters = self.chain.counters[index]
        if not self.propagating:
            counters.groundings += 1
            ground = ground_program(self.chain.unit_program(index), facts, registry=self.registry, limits=self.limits)
            self._record_defined(index, ground, facts)
            return ground
        if self._grounds[index] is None:
            counters.groundings += 1
            if index == 0:
                ground = Instantiator(
                    self.chain.unit_program(0), self.facts, registry=self.registry, limits=self.limits,
                ).run().program_out()
                self._record_defined(0, ground, self.facts)
            else:
                ground = Instantiator(
                    self.chain.unit_program(index), registry=self.registry, limits=self.limits,
                    open_atoms=self.chain.domain_before(index, self.facts),
                ).run().program_out()
                self._record_defined(index, ground, ())
            self._grounds[index] = ground
        return self._grounds[index]

    def solver_for(self, index, facts):
        ground = self.ground_unit(index, facts)
        if not self.propagating or index == 0:
            return Solver(ground, registry=self.registry, limits=self.limits)
        domain = self.chain.domain_before(index, self.facts)
        return Solver(
            ground, facts, registry=self.registry, limits=self.limits,
            handler=partial(analyze_inconsistency, domain), domain=domain,
        )

    def _evaluate(self, index, facts):
        counters = self.chain.counters[index]
        solver = self.solver_for(index, facts)
        counters.solves += 1
        self._solvers[index] = solver
        last = index == len(self.chain) - 1
        try:
            for outcome in solver.answer_sets():
                if last:
                    self.answer_sets.add(outcome.answer_set)
                else:
                    self._evaluate(index + 1, outcome.answer_set)
                if self._cut is not None:
                    if self._cut < index:
                        break
                    self._cut = None
        finally:
            counters.conflicts += solver.stats.conflicts
            self._solvers[index] = None
        if isinstance(solver.handler_result, InconsistencyReason):
            self.propagate(solver.handler_result)

    def propagate(self, reason):
        """Install the reason's constraint and abandon the units below its host."""
        host = self.chain.install(reason, self.facts)
        if host is None:
            return None
        constraint = self.chain.learned_constraints[host][-1]
        if self._grounds[host] is not None:
            self._grounds[host] = self._grounds[host].extend([constraint])
        solver = self._solvers[host]
        if solver is not None:
            solver.add_constraint(constraint)
            # the current input violates the constraint, so the path below the host is dead
            self._cut = host
        return host


def evaluate_chain(chain, facts=(), mode='splitting', registry=None, limits=None):
    return ChainEvaluation(chain, facts, mode, registry, limits).run()


def tu_propagate(chain, failing_unit_index, input_facts, facts=(), registry=None, limits=None):
    """
    Analyze one inconsistent unit under the given input and push the learned
    constraint into the chain. Predecessors are grounded for every input.
    """
    if failing_unit_index <= 0 or failing_unit_index >= len(chain):
        raise ChainError("only a unit with predecessors can propagate")
    run = ChainEvaluation(chain, facts, 'tuprop', registry, limits)
    for index in range(failing_unit_index):
        run.ground_unit(index, ())
    solver = run.solver_for(failing_unit_index, frozenset(input_facts))
    outcome = solver.solve()
    chain.counters[failing_unit_index].solves += 1
    if isinstance(outcome.handler_result, InconsistencyReason):
        run.propagate(outcome.handler_result)
    return chain


def _subsets(atoms):
    atoms = sorted(atoms, key=atom_key)
    return iter_chain.from_iterable(combinations(atoms, k) for k in range(len(atoms) + 1))


def check_learned_constraint(unit, constraint, d, f_space=None, registry=None, limits=None):
    """Adding the constraint leaves AS(unit + F) unchanged for every F in f_space (default: all F over d)."""
    limits = limits or get_limits()
    if f_space is None:
        limits.check('max_ir_domain', len(d))
        f_space = _subsets(d)
    extended = unit.extend([constraint])
    for inputs in f_space:
        before = solve_all(unit, inputs, registry=registry, limits=limits)
        after = solve_all(extended, inputs, registry=registry, limits=limits)
        if before != after:
            logger.warning("'%s' changes the answer sets for input %s", constraint, sorted(map(str, inputs)))
            return False
    return True
