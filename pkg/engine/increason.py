"""
Inconsistency reasons from level-0 conflicts.

``analyze_inconsistency`` is the handler the solver calls when the nogoods
are violated before any guess: it resolves the conflict against the trail
until only domain literals are left. ``analyze_nonground`` lifts the result
from the optimized grounding back to the non-ground program by giving every
(possibly optimized-away) atom an extra primed support.
"""

import logging
from dataclasses import dataclass
from functools import partial
from itertools import product

from .ast import Atom, InconsistencyReason, Rule, atom_key, atoms_of, pos, term_key
from .cdnl import Solver, SolveOutcome
from .exceptions import AnalysisError, DomainError
from .grounder import Instantiator, ground_program
from .limits import get_limits
from .refsem import check_ir, irs_bruteforce, minimize_ir

logger = logging.getLogger(__name__)

PRIME = 'prime'
PRIMED_MODES = ('all', 'undefined')
METHODS = ('cdnl', 'tau', 'bruteforce')


def primed(atom):
    return Atom(PRIME, (atom.as_term(),))


def is_primed(atom):
    return atom.predicate == PRIME and len(atom.args) == 1


@dataclass(frozen=True)
class NotLiftable:
    """The reason found on the grounding mentions a primed atom."""

    reason: InconsistencyReason

    def __str__(self):
        return f"not liftable: {self.reason}"


def analyze_inconsistency(domain, search, conflict):
    """
    Resolve a violated nogood with trail implicants until it only mentions
    domain atoms; returns the reason (true atoms, false atoms).
    """
    domain = frozenset(domain)
    trail = search.trail
    if trail.decision_level != 0:
        raise AnalysisError("inconsistency analysis needs a conflict at decision level 0")
    symbols = search.symbols
    delta = set(search.nogoods[conflict])
    steps = 0
    while True:
        outside = [c for c in delta if symbols.var(abs(c)) not in domain]
        if not outside:
            break
        latest = max(outside, key=lambda c: trail.pos[abs(c)])
        reason = trail.reason[abs(latest)]
        if reason is None:
            raise AnalysisError(f"'{symbols.var(abs(latest))}' was assigned without an implicant")
        delta.discard(latest)
        delta |= {c for c in search.nogoods[reason] if c != -latest}
        steps += 1
    found = InconsistencyReason(
        frozenset(symbols.var(c) for c in delta if c > 0),
        frozenset(symbols.var(-c) for c in delta if c < 0),
    )
    logger.debug("inconsistency analysis took %d resolution steps: %s", steps, found)
    return found


def _check_input(program, facts, domain):
    domain = frozenset(domain)
    heads = program.heads() & domain
    if heads:
        raise DomainError(f"domain atoms occur in rule heads: {', '.join(sorted(map(str, heads)))}")
    outside = frozenset(facts) - domain
    if outside:
        raise DomainError(f"facts outside the domain: {', '.join(sorted(map(str, outside)))}")
    return domain


def analyze_with_solver(program, facts, domain, registry=None, limits=None, **options):
    """Solve program + facts; an answer set or the reason behind the inconsistency."""
    domain = _check_input(program, facts, domain)
    ground = ground_program(program, registry=registry, limits=limits)
    handler = partial(analyze_inconsistency, domain)
    return Solver(ground, facts, registry=registry, limits=limits, handler=handler, **options).solve()


def _missing_heads(program, instantiator, constants, limits):
    """Ground head atoms with at least one instance the optimized grounding dropped."""
    missing = set()
    universe = sorted(constants, key=term_key)
    for rule in program.rules:
        if rule.is_constraint:
            continue
        variables = sorted(rule.global_variables(), key=lambda v: v.name)
        limits.check('max_ground_rules', len(universe) ** len(variables))
        for values in product(universe, repeat=len(variables)):
            theta = dict(zip(variables, values))
            instance = instantiator.instance(rule, theta)
            if instance is None or instance in instantiator.instances:
                continue
            missing.update(instance.head)
    return missing


def lifting_program(program, facts, domain, constants=None, primed_mode='all', registry=None, limits=None):
    """
    The optimized grounding plus a <- prime(a) for the atoms that may have
    lost support; returns (ground program, primed atoms).
    """
    if primed_mode not in PRIMED_MODES:
        raise ValueError(f"primed mode must be one of {', '.join(PRIMED_MODES)}")
    limits = limits or get_limits()
    instantiator = Instantiator(program, facts, constants, registry, limits=limits).run()
    ground = instantiator.program_out()
    if primed_mode == 'undefined':
        universe = instantiator.universe if constants is None else constants
        candidates = _missing_heads(program, instantiator, universe, limits)
    else:
        candidates = atoms_of(ground)
    candidates = {a for a in candidates if not a.is_auxiliary} - set(domain)
    extra = []
    primes = set()
    for atom in sorted(candidates, key=atom_key):
        primes.add(primed(atom))
        extra.append(Rule((atom,), (pos(primed(atom)),)))
    logger.debug("lifting adds %d primed supports (%s)", len(extra), primed_mode)
    return ground.extend(extra), frozenset(primes)


def analyze_nonground(program, facts, domain, constants=None, primed_mode='all', registry=None, limits=None):
    """
    Analyze the optimized grounding of a non-ground program. The outcome's
    handler result is an InconsistencyReason of the program itself, or
    NotLiftable when the conflict depends on a primed atom.
    """
    domain = _check_input(program, facts, domain)
    ground, primes = lifting_program(program, facts, domain, constants, primed_mode, registry, limits)
    handler = partial(analyze_inconsistency, domain | primes)
    outcome = Solver(ground, facts, registry=registry, limits=limits, handler=handler).solve()
    if outcome.is_answer_set:
        return outcome
    reason = outcome.handler_result
    if reason.atoms & primes:
        return SolveOutcome(handler_result=NotLiftable(reason), stats=outcome.stats)
    return outcome


def analyze_via(method, program, domain, facts=(), registry=None, limits=None, minimize=False, primed_mode='all'):
    """
    Inconsistency reasons of the program wrt. the domain, by one of three
    methods: the solver's level-0 analysis (one reason for the given facts),
    the meta-encoding (all reasons) or brute force (all reasons).
    """
    if method not in METHODS:
        raise ValueError(f"method must be one of {', '.join(METHODS)}")
    domain = frozenset(domain)
    if method == 'bruteforce':
        return sorted(irs_bruteforce(program, domain, registry, limits), key=_reason_key)
    if method == 'tau':
        from .metaenc import enumerate_irs_tau

        return sorted(enumerate_irs_tau(program, domain, registry=registry, limits=limits), key=_reason_key)
    if program.is_ground:
        outcome = analyze_with_solver(program, facts, domain, registry, limits)
    else:
        outcome = analyze_nonground(
            program, facts, domain, primed_mode=primed_mode, registry=registry, limits=limits,
        )
    reason = outcome.handler_result
    if outcome.is_answer_set or reason is None or isinstance(reason, NotLiftable):
        return []
    if minimize:
        reason = minimize_ir(
            program, domain, reason,
            check=lambda r: check_ir(program, domain, r, registry=registry, limits=limits),
        )
    return [reason]


def _reason_key(reason):
    return (
        len(reason.atoms),
        sorted(atom_key(a) for a in reason.r_plus),
        sorted(atom_key(a) for a in reason.r_minus),
    )
