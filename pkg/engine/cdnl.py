"""
Conflict-driven nogood learning for programs with external atoms.

The search core (``Search``) is a plain nogood solver: a trail with decision
levels and implicants, two-watched-literal propagation, first-UIP analysis
and backjumping. ``Solver`` drives it over the completion of the guessing
program and checks every complete assignment for compatibility with the
external oracles and for FLP minimality. Conflicts at decision level 0 are
handed to an inconsistency handler whose result becomes the solve outcome.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Optional

from .ast import Rule, atom_key, normalize_constraints, pos, neg
from .exceptions import AnalysisError, BoundExceeded, NotGround, UnsupportedProgram
from .externals import (
    NEGATED_REPLACEMENT_PREFIX, extensions_of, external_of, is_replacement, learn_io_nogoods,
    registry_for, replacement_atoms,
)
from .grounder import _evaluate_builtins, ground_program
from .limits import get_limits
from .nogoods import (
    Body, SignedLiteral, SymbolTable, clark_completion, nogood_key, unfounded_set_nogood, var_key,
)
from .refsem import body_satisfied, gl_reduct, tp_lfp

logger = logging.getLogger(__name__)


@dataclass
class SolverStats:
    decisions: int = 0
    conflicts: int = 0
    learned: int = 0
    restarts: int = 0
    candidates: int = 0
    rejected_candidates: int = 0
    minimality_checks: int = 0
    theory_nogoods: int = 0


def _is_guess_atom(atom):
    return is_replacement(atom) or atom.predicate.startswith(NEGATED_REPLACEMENT_PREFIX)


class Trail:
    """Ordered assignment; each entry knows its level and implicant nogood."""

    def __init__(self, size=0):
        self.value = [None]
        self.level = [0]
        self.reason = [None]
        self.pos = [0]
        self.lits = []
        self.level_starts = []
        self.qhead = 0
        self.grow(size)

    def grow(self, size):
        missing = size + 1 - len(self.value)
        if missing > 0:
            self.value.extend([None] * missing)
            self.level.extend([0] * missing)
            self.reason.extend([None] * missing)
            self.pos.extend([0] * missing)

    @property
    def decision_level(self):
        return len(self.level_starts)

    def is_true(self, lit):
        value = self.value[abs(lit)]
        return value is not None and value == (lit > 0)

    def is_false(self, lit):
        value = self.value[abs(lit)]
        return value is not None and value != (lit > 0)

    def is_assigned(self, var):
        return self.value[var] is not None

    def assign(self, lit, reason):
        var = abs(lit)
        self.value[var] = lit > 0
        self.level[var] = self.decision_level
        self.reason[var] = reason
        self.pos[var] = len(self.lits)
        self.lits.append(lit)

    def decide(self, lit):
        self.level_starts.append(len(self.lits))
        self.assign(lit, None)

    def backjump(self, level):
        if level >= self.decision_level:
            return
        start = self.level_starts[level]
        for lit in self.lits[start:]:
            var = abs(lit)
            self.value[var] = None
            self.reason[var] = None
        del self.lits[start:]
        del self.level_starts[level:]
        self.qhead = min(self.qhead, len(self.lits))


class Search:
    """Nogood store plus trail; the generic part of the solver loop."""

    def __init__(self, symbols, record_resolution=False):
        self.symbols = symbols
        self.trail = Trail(len(symbols))
        self.nogoods = []
        self.watches = {}
        self.learned = []
        self.deleted = set()
        self.record_resolution = record_resolution
        self.resolution_log = []
        self.stats = SolverStats()
        self._order = sorted(symbols.indices(), key=lambda i: var_key(symbols.var(i)))
        self._cursor = 0

    def literals(self, index):
        return frozenset(self.symbols.decode(c) for c in self.nogoods[index])

    def ensure_symbols(self):
        """Pick up variables interned after construction."""
        size = len(self.symbols)
        if size + 1 > len(self.trail.value):
            self.trail.grow(size)
            self._order = sorted(self.symbols.indices(), key=lambda i: var_key(self.symbols.var(i)))
            self._cursor = 0

    def add_nogood(self, literals, learned=False):
        return self.add_all([literals], learned)

    def add_codes(self, codes, learned=False):
        """Add a nogood; returns its index when violated, else None."""
        return self.add_batch([codes], learned)

    def add_all(self, nogoods, learned=False):
        """Add several nogoods; returns one that is violated afterwards, if any."""
        batch = [{self.symbols.encode(l) for l in nogood} for nogood in sorted(nogoods, key=nogood_key)]
        self.ensure_symbols()
        return self.add_batch(batch, learned)

    def _asserting_level(self, codes):
        """Level at which the nogood is violated or unit, None when neither."""
        trail = self.trail
        open_ = [c for c in codes if not trail.is_true(c)]
        if not open_:
            return max((trail.level[abs(c)] for c in codes), default=0)
        if len(open_) > 1:
            return None
        unit = open_[0]
        top = max((trail.level[abs(c)] for c in codes if c != unit), default=0)
        if not trail.is_assigned(abs(unit)) or trail.level[abs(unit)] > top:
            return top
        return None

    def add_batch(self, batch, learned=False):
        """
        Add nogoods given as code sets. The trail first goes back to the
        lowest level at which one of them is violated or unit; unit ones
        are then asserted there. Returns the index of a violated one or None.
        """
        trail = self.trail
        batch = [set(codes) for codes in batch if not any(-c in codes for c in codes)]
        while True:
            levels = [level for level in map(self._asserting_level, batch) if level is not None]
            if not levels or min(levels) >= trail.decision_level:
                break
            self.backjump(min(levels))
        conflict = None
        for codes in batch:
            ordered = sorted(
                codes,
                key=lambda c: (
                    trail.is_true(c),
                    trail.is_assigned(abs(c)),
                    -trail.pos[abs(c)] if trail.is_assigned(abs(c)) else 0,
                ),
            )
            index = len(self.nogoods)
            self.nogoods.append(ordered)
            if learned:
                self.learned.append(index)
                self.stats.learned += 1
            if ordered:
                self._watch(index)
            open_ = [c for c in ordered if not trail.is_true(c)]
            if not open_:
                if conflict is None:
                    conflict = index
            elif len(open_) == 1 and conflict is None and not trail.is_assigned(abs(open_[0])):
                trail.assign(-open_[0], index)
        return conflict

    def _watch(self, index):
        nogood = self.nogoods[index]
        for code in nogood[:2]:
            self.watches.setdefault(code, []).append(index)

    def assume(self, literal):
        """Assign a literal at the current level without implicant (tests, setup)."""
        self.ensure_symbols()
        self.trail.assign(self.symbols.encode(literal), None)

    def decide(self, literal):
        self.ensure_symbols()
        self.stats.decisions += 1
        self.trail.decide(self.symbols.encode(literal) if isinstance(literal, SignedLiteral) else literal)

    def propagate(self):
        """Unit propagation to fixpoint; the index of a violated nogood or None."""
        trail = self.trail
        while trail.qhead < len(trail.lits):
            lit = trail.lits[trail.qhead]
            trail.qhead += 1
            watching = self.watches.get(lit)
            if not watching:
                continue
            kept = []
            conflict = None
            for index in watching:
                if conflict is not None:
                    kept.append(index)
                    continue
                if index in self.deleted:
                    continue
                nogood = self.nogoods[index]
                if len(nogood) == 1:
                    kept.append(index)
                    conflict = index
                    continue
                if nogood[0] == lit:
                    nogood[0], nogood[1] = nogood[1], nogood[0]
                if nogood[1] != lit:
                    continue
                other = nogood[0]
                if trail.is_false(other):
                    kept.append(index)
                    continue
                for k in range(2, len(nogood)):
                    candidate = nogood[k]
                    if not trail.is_true(candidate):
                        nogood[1], nogood[k] = candidate, nogood[1]
                        self.watches.setdefault(candidate, []).append(index)
                        break
                else:
                    kept.append(index)
                    if trail.is_true(other):
                        conflict = index
                    else:
                        trail.assign(-other, index)
            self.watches[lit] = kept
            if conflict is not None:
                return conflict
        return None

    def analyze(self, conflict):
        """First-UIP learning; returns (learned codes, backjump level)."""
        learned, level, steps = analyze_codes(self.nogoods[conflict], self.trail, self.nogoods)
        if self.record_resolution:
            self.resolution_log.append((tuple(self.nogoods[conflict]), steps, frozenset(learned)))
        return learned, level

    def resolve_conflict(self, conflict):
        """Learn from a conflict above level 0 and assert the UIP."""
        self.stats.conflicts += 1
        learned, level = self.analyze(conflict)
        if logger.isEnabledFor(logging.DEBUG):
            logger.debug(
                "conflict at level %d, learned %d literals, backjump to %d",
                self.trail.decision_level, len(learned), level,
            )
        self.backjump(level)
        return self.add_codes(learned, learned=True)

    def next_decision(self):
        trail = self.trail
        while self._cursor < len(self._order) and trail.is_assigned(self._order[self._cursor]):
            self._cursor += 1
        if self._cursor == len(self._order):
            return None
        var = self._order[self._cursor]
        return -var

    def backjump(self, level):
        self.trail.backjump(level)
        self._cursor = 0

    def is_complete(self):
        return len(self.trail.lits) == len(self.symbols)

    def true_vars(self):
        return [self.symbols.var(abs(l)) for l in self.trail.lits if l > 0]

    def delete_learned(self, keep):
        """Drop the oldest learned nogoods that are not currently implicants."""
        locked = {r for r in self.trail.reason if r is not None}
        removable = [i for i in self.learned if i not in locked and i not in self.deleted]
        for index in removable[:max(0, len(removable) - keep)]:
            self.deleted.add(index)
        self.learned = [i for i in self.learned if i not in self.deleted]


def analyze_codes(conflict, trail, nogoods):
    level = max((trail.level[abs(c)] for c in conflict), default=0)
    learned = set(conflict)
    steps = []
    while True:
        at_level = [c for c in learned if trail.level[abs(c)] == level]
        if len(at_level) <= 1:
            break
        latest = max(at_level, key=lambda c: trail.pos[abs(c)])
        reason = trail.reason[abs(latest)]
        if reason is None:
            raise AnalysisError("resolution reached a decision before the UIP")
        steps.append(reason)
        learned.discard(latest)
        learned |= {c for c in nogoods[reason] if c != -latest}
    backjump = max((trail.level[abs(c)] for c in learned if trail.level[abs(c)] != level), default=0)
    return learned, backjump, steps


def analyze_conflict(conflict, search):
    """
    First-UIP analysis of a violated nogood (SignedLiteral set or index).
    Returns the learned nogood as SignedLiterals and the backjump level.
    """
    if isinstance(conflict, int):
        codes = search.nogoods[conflict]
    else:
        codes = [search.symbols.encode(l) for l in conflict]
    learned, level, _ = analyze_codes(codes, search.trail, search.nogoods)
    return frozenset(search.symbols.decode(c) for c in learned), level


def rewrite_guessing_program(program):
    """Replace external atoms by replacement atoms and add e <- not ne, ne <- not e."""
    guesses = []
    seen = set()
    rules = []
    for rule in program.rules:
        body = []
        for literal in rule.body:
            if literal.kind == 'query':
                raise UnsupportedProgram(f"query atom in '{rule}' must be rewritten first")
            if literal.kind != 'external':
                body.append(literal)
                continue
            external = literal.payload
            if not external.is_ground:
                raise NotGround(f"external atom '{external}' is not ground")
            e, ne = replacement_atoms(external)
            if e not in seen:
                seen.add(e)
                guesses.append(Rule((e,), (neg(ne),)))
                guesses.append(Rule((ne,), (neg(e),)))
            body.append(pos(e) if literal.positive else neg(e))
        rules.append(Rule(rule.head, tuple(body)))
    return program.with_rules(guesses + rules)


@dataclass(frozen=True)
class SolveOutcome:
    """Either an answer set or whatever the inconsistency handler returned."""

    answer_set: Optional[frozenset] = None
    handler_result: Any = None
    interpretation: Optional[frozenset] = None
    stats: Any = field(default=None, compare=False)

    @property
    def is_answer_set(self):
        return self.answer_set is not None


def bottom_handler(search, conflict):
    return None


class MinimalityCheck:
    """Searches a model of the FLP reduct strictly inside a candidate."""

    def __init__(self, program, interpretation, registry, limits):
        self.program = program
        self.interpretation = frozenset(interpretation)
        self.registry = registry
        self.limits = limits

    def smaller_model(self):
        symbols = SymbolTable()
        for atom in sorted(self.interpretation, key=atom_key):
            symbols.intern(atom)
        nogoods = []
        externals = {}
        for rule in self.program.rules:
            if not body_satisfied(rule, self.interpretation, self.registry):
                continue
            literals = set()
            for literal in rule.body:
                if literal.kind == 'ordinary':
                    if literal.positive:
                        literals.add(SignedLiteral(True, literal.payload))
                elif literal.kind == 'external':
                    e, _ = replacement_atoms(literal.payload)
                    externals[e] = literal.payload
                    literals.add(SignedLiteral(literal.positive, e))
                elif literal.kind == 'conditional':
                    raise UnsupportedProgram(f"conditional literal in '{rule}' must be expanded first")
            for head in rule.head:
                if head in self.interpretation:
                    literals.add(SignedLiteral(False, head))
            nogoods.append(frozenset(literals))
        for e in sorted(externals, key=atom_key):
            symbols.intern(e)
        nogoods.append(frozenset(SignedLiteral(True, a) for a in self.interpretation))
        search = Search(symbols)
        pending = search.add_all(nogoods)
        atoms = [a for a in self.interpretation]
        while True:
            conflict = pending if pending is not None else search.propagate()
            pending = None
            if conflict is not None:
                if search.trail.decision_level == 0:
                    return None
                if search.stats.conflicts >= self.limits.max_minimality_conflicts:
                    raise BoundExceeded('max_minimality_conflicts', search.stats.conflicts)
                pending = search.resolve_conflict(conflict)
                continue
            lit = search.next_decision()
            if lit is not None:
                search.decide(lit)
                continue
            smaller = frozenset(a for a in search.true_vars() if a in self.interpretation)
            wrong = []
            for e, external in externals.items():
                actual = self.registry.evaluate(external, smaller)
                if search.trail.is_true(symbols.index(e)) != actual:
                    decl = self.registry.get(external.name)
                    wrong.extend(learn_io_nogoods(decl, external, smaller, atoms))
            if not wrong:
                return smaller
            pending = search.add_all(wrong)
            if pending is None and search.is_complete():
                pending = search.add_codes(set(search.trail.lits))


class Solver:
    """
    Conflict-driven solver for ground programs, possibly disjunctive and
    possibly with external atoms. ``solve`` returns the first answer set,
    ``answer_sets`` enumerates them.
    """

    def __init__(self, program, facts=(), registry=None, limits=None, handler=None, domain=(),
                 theory_propagation=True, restarts=False, deletion=False, record_resolution=False):
        if not program.is_ground:
            raise NotGround("the solver needs a ground program")
        self.limits = limits or get_limits()
        self.registry = registry_for(program, registry)
        fact_rules = tuple(Rule((a,)) for a in sorted(facts, key=atom_key))
        rules = [_evaluate_builtins(r) for r in program.extend(fact_rules).rules]
        self.program = normalize_constraints(program.with_rules(r for r in rules if r is not None))
        self.guessing = rewrite_guessing_program(self.program)
        self.handler = handler or bottom_handler
        self.theory_propagation = theory_propagation
        self.restarts = restarts
        self.deletion = deletion
        self._ordinary = self.program.is_ordinary and not any(
            l.kind == 'conditional' for r in self.program.rules for l in r.body
        )
        self._plain_normal = self._ordinary and self.program.is_normal
        completion = clark_completion(self.guessing)
        variables = {l.var for nogood in completion for l in nogood}
        # atoms without rules are false; kept so oracle nogoods can mention them
        for atom in set(domain) - variables:
            completion.add(frozenset({SignedLiteral(True, atom)}))
            variables.add(atom)
        symbols = SymbolTable()
        for var in sorted(variables, key=var_key):
            symbols.intern(var)
        self.search = Search(symbols, record_resolution=record_resolution)
        self.pending = self.search.add_all(completion)
        self._externals = self._external_inputs()
        self._propagated = set()
        self._queued = []
        self.handler_result = None
        self._restart_limit = 64
        logger.debug(
            "solver ready: %d variables, %d nogoods, %d external atoms",
            len(symbols), len(self.search.nogoods), len(self._externals),
        )

    @property
    def stats(self):
        return self.search.stats

    @property
    def trail(self):
        return self.search.trail

    @property
    def symbols(self):
        return self.search.symbols

    def _external_inputs(self):
        found = {}
        atoms = [v for v in self.symbols.atoms() if not is_replacement(v)]
        for var in self.symbols.atoms():
            if not is_replacement(var):
                continue
            external = external_of(var)
            decl = self.registry.get(external.name)
            decl.check_arity(external)
            predicates = external.input_predicates
            relevant = []
            for atom in atoms:
                if atom.predicate in predicates:
                    index = predicates.index(atom.predicate)
                    if decl.is_relevant(index, atom, tuple(external.outputs)):
                        relevant.append(self.symbols.index(atom))
            found[var] = (external, decl, relevant)
        return found

    def _true_atoms(self):
        return frozenset(v for v in self.search.true_vars() if not isinstance(v, Body))

    def _theory_propagate(self):
        trail = self.trail
        found = []
        true_atoms = None
        for var, (external, decl, relevant) in self._externals.items():
            if not all(trail.is_assigned(i) for i in relevant):
                continue
            key = (var, tuple(trail.value[i] for i in relevant))
            if key in self._propagated:
                continue
            self._propagated.add(key)
            if true_atoms is None:
                true_atoms = self._true_atoms()
            found.extend(learn_io_nogoods(decl, external, true_atoms, self.symbols.atoms()))
        if found:
            self.stats.theory_nogoods += len(found)
            return self.search.add_all(found), True
        return None, False

    def _check_candidate(self):
        """
        Compatibility with the oracles, then FLP minimality. Returns whether
        the candidate is accepted and the conflict to resume from.
        """
        self.stats.candidates += 1
        true_atoms = self._true_atoms()
        wrong = []
        for var, (external, decl, _) in self._externals.items():
            actual = decl.evaluator(extensions_of(external, true_atoms), tuple(external.outputs))
            if (var in true_atoms) != actual:
                wrong.extend(learn_io_nogoods(decl, external, true_atoms, self.symbols.atoms()))
        if wrong:
            self.stats.rejected_candidates += 1
            conflict = self.search.add_all(wrong)
            if conflict is None and self.search.is_complete():
                conflict = self._block()
            return False, conflict
        interpretation = frozenset(a for a in true_atoms if not _is_guess_atom(a))
        smaller = self._smaller_model(interpretation)
        if smaller is not None:
            self.stats.rejected_candidates += 1
            return False, self._refute(interpretation, smaller)
        return True, None

    def _smaller_model(self, interpretation):
        """A model of the reduct strictly inside the interpretation, or None."""
        self.stats.minimality_checks += 1
        if self._plain_normal:
            derived = tp_lfp(gl_reduct(self.program, interpretation))
            return None if derived == interpretation else derived
        return MinimalityCheck(self.program, interpretation, self.registry, self.limits).smaller_model()

    def _refute(self, interpretation, smaller):
        """
        Nogood against a candidate that is not minimal. Ordinary programs get
        the loop nogood of the atoms the smaller model leaves out; programs
        with external atoms block the full assignment.
        """
        if not self._ordinary:
            return self._block()
        nogood = unfounded_set_nogood(self.program, interpretation, interpretation - smaller)
        # atoms outside the symbol table are false in every assignment
        return self.search.add_all([frozenset(l for l in nogood if l.var in self.symbols)])

    def _block(self):
        """Nogood of the full assignment over all atoms."""
        trail = self.trail
        codes = set()
        for index in self.symbols.indices():
            if isinstance(self.symbols.var(index), Body):
                continue
            codes.add(index if trail.value[index] else -index)
        return self.search.add_codes(codes)

    def _conflict_at_top(self, conflict):
        return self.handler(self.search, conflict)

    def add_constraint(self, rule):
        """
        Queue a ground constraint over ordinary atoms; it takes effect when the
        search resumes. Returns False when it cannot fire in this program.
        """
        codes = set()
        for literal in rule.body:
            if literal.kind != 'ordinary':
                raise UnsupportedProgram(f"learned constraint '{rule}' must be ordinary")
            if literal.payload not in self.symbols:
                if literal.positive:
                    return False
                continue
            index = self.symbols.index(literal.payload)
            codes.add(index if literal.positive else -index)
        self._queued.append(codes)
        return True

    def _flush(self):
        """Add queued constraints; a violated nogood among them (or the pending one) is returned."""
        search = self.search
        queued, self._queued = self._queued, []
        conflict = search.add_batch(queued)
        if conflict is not None:
            return conflict
        pending = self.pending
        if pending is not None and all(search.trail.is_true(c) for c in search.nogoods[pending]):
            return pending
        return None

    def _run(self):
        """Search until a verified answer set (returned) or a level-0 conflict."""
        search = self.search
        while True:
            if self._queued:
                self.pending = self._flush()
            conflict = self.pending if self.pending is not None else search.propagate()
            self.pending = None
            if conflict is not None:
                if search.trail.decision_level == 0:
                    return False, conflict
                self.pending = search.resolve_conflict(conflict)
                self._maybe_restart()
                continue
            if self.theory_propagation and search.trail.decision_level > 0 and self._externals:
                conflict, added = self._theory_propagate()
                if added:
                    self.pending = conflict
                    continue
            lit = search.next_decision()
            if lit is not None:
                search.decide(lit)
                continue
            accepted, self.pending = self._check_candidate()
            if accepted:
                return True, self._true_atoms()

    def _maybe_restart(self):
        if not self.restarts:
            return
        if self.stats.conflicts >= self._restart_limit:
            self._restart_limit = int(self._restart_limit * 1.5)
            self.stats.restarts += 1
            self.search.backjump(0)
            if self.deletion:
                self.search.delete_learned(keep=len(self.symbols))

    def _outcome(self, atoms):
        interpretation = frozenset(a for a in atoms if not isinstance(a, Body))
        visible = frozenset(a for a in interpretation if not a.is_auxiliary)
        return SolveOutcome(answer_set=visible, interpretation=interpretation, stats=self.stats)

    def solve(self):
        found, value = self._run()
        if found:
            logger.debug("answer set found after %d conflicts", self.stats.conflicts)
            return self._outcome(value)
        logger.debug("level-0 conflict after %d conflicts", self.stats.conflicts)
        return SolveOutcome(handler_result=self._conflict_at_top(value), stats=self.stats)

    def answer_sets(self):
        """Yield every answer set once (as full interpretations), blocking each after use."""
        seen = 0
        while True:
            found, value = self._run()
            if not found:
                if not seen:
                    self.handler_result = self._conflict_at_top(value)
                return
            seen += 1
            self.limits.check('max_answer_sets', seen)
            yield self._outcome(value)
            self.pending = self._block()


def solve(program, facts=(), handler=None, registry=None, limits=None, **options):
    """Ground the program if needed and return the first answer set or the handler's value."""
    ground = ground_program(program, facts, registry=registry, limits=limits)
    return Solver(ground, registry=registry, limits=limits, handler=handler, **options).solve()


def solve_all(program, facts=(), registry=None, limits=None, projected=True, **options):
    ground = ground_program(program, facts, registry=registry, limits=limits)
    solver = Solver(ground, registry=registry, limits=limits, **options)
    found = set()
    for outcome in solver.answer_sets():
        found.add(outcome.answer_set if projected else outcome.interpretation)
    return found


def solve_disjunctive(program, registry=None, limits=None):
    """All answer sets of a (possibly disjunctive) program, auxiliaries projected away."""
    return solve_all(program, registry=registry, limits=limits)


def has_answer_set(program, facts=(), registry=None, limits=None):
    return solve(program, facts, registry=registry, limits=limits).is_answer_set
