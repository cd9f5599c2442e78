"""
Brute-force reference semantics.

Everything here is deliberately naive: answer sets by enumeration of
interpretations, inconsistency reasons by enumeration of fact sets. The
solver and the encodings are tested against these functions, so they favour
obviousness over speed. Every enumeration is bounded by engine.limits.
"""

import logging
from functools import lru_cache
from itertools import chain, combinations

from .ast import (
    Atom, InconsistencyReason, Rule, atom_key, atoms_of, facts, herbrand_universe, neg, pos,
)
from .exceptions import AnalysisError, DomainError, UnsupportedProgram
from .externals import ExternalRegistry, registry_for
from .limits import get_limits

logger = logging.getLogger(__name__)


def _subsets(items):
    items = list(items)
    return chain.from_iterable(combinations(items, k) for k in range(len(items) + 1))


def literal_holds(literal, interpretation, registry):
    kind = literal.kind
    if kind == 'ordinary':
        value = literal.payload in interpretation
    elif kind == 'builtin':
        value = literal.payload.evaluate()
    elif kind == 'external':
        value = registry.evaluate(literal.payload, interpretation)
    elif kind == 'conditional':
        cond = literal.payload
        value = cond.condition not in interpretation or literal_holds(cond.template, interpretation, registry)
    else:
        raise UnsupportedProgram(f"query atom '{literal.payload}' needs rewriting first")
    return value if literal.positive else not value


def body_satisfied(rule, interpretation, registry=None):
    registry = registry or ExternalRegistry.default()
    return all(literal_holds(l, interpretation, registry) for l in rule.body)


def is_model(program, interpretation, registry=None):
    registry = registry_for(program, registry)
    for rule in program.rules:
        if body_satisfied(rule, interpretation, registry) and not any(h in interpretation for h in rule.head):
            return False
    return True


def _drop_builtins(rule):
    """Evaluate ground comparisons; None when one of them is false."""
    body = []
    for literal in rule.body:
        if literal.kind == 'builtin':
            if literal.payload.evaluate() != literal.positive:
                return None
            continue
        body.append(literal)
    return Rule(rule.head, tuple(body))


def gl_reduct(program, interpretation):
    """{H(r) <- B+(r) | B-(r) false in I}; builtins are evaluated on the way."""
    rules = []
    for rule in program.rules:
        if any(l.kind not in ('ordinary', 'builtin') for l in rule.body):
            raise UnsupportedProgram(f"rule '{rule}' is not ordinary")
        rule = _drop_builtins(rule)
        if rule is None or any(a in interpretation for a in rule.negative_atoms):
            continue
        rules.append(Rule(rule.head, tuple(pos(a) for a in rule.positive_atoms)))
    return program.with_rules(rules)


def flp_reduct(program, interpretation, registry=None):
    registry = registry_for(program, registry)
    return program.with_rules(r for r in program.rules if body_satisfied(r, interpretation, registry))


def tp_lfp(program):
    """Least model of a positive normal program; constraints are ignored."""
    waiting = []
    watchers = {}
    derived = set()
    queue = []
    for rule in program.rules:
        if rule.is_disjunctive:
            raise UnsupportedProgram(f"rule '{rule}' is disjunctive")
        if any(not l.positive or l.kind != 'ordinary' for l in rule.body):
            raise UnsupportedProgram(f"rule '{rule}' is not positive")
        if rule.is_constraint:
            continue
        body = set(rule.positive_atoms)
        index = len(waiting)
        waiting.append([len(body), rule.head[0]])
        if not body:
            queue.append(rule.head[0])
        for atom in body:
            watchers.setdefault(atom, []).append(index)
    while queue:
        atom = queue.pop()
        if atom in derived:
            continue
        derived.add(atom)
        for index in watchers.get(atom, ()):
            waiting[index][0] -= 1
            if waiting[index][0] == 0:
                queue.append(waiting[index][1])
    return frozenset(derived)


def _ground(program):
    if program.is_ground:
        return program
    from .grounder import ground_naive

    return ground_naive(program, herbrand_universe(program))


def _is_plain_normal(program):
    return program.is_normal and all(
        l.kind in ('ordinary', 'builtin') for r in program.rules for l in r.body
    )


def answer_sets_bruteforce(program, registry=None, limits=None):
    """All answer sets, as sets of true atoms (auxiliaries included)."""
    limits = limits or get_limits()
    registry = registry_for(program, registry)
    program = _ground(program)
    atoms = atoms_of(program)
    limits.check('max_atoms', len(atoms))
    if _is_plain_normal(program):
        return _answer_sets_gl(program)
    return _answer_sets_flp(program, atoms, registry)


def _answer_sets_gl(program):
    rules = [r for r in (_drop_builtins(r) for r in program.rules) if r is not None]
    program = program.with_rules(rules)
    negated = sorted(program.negative_body(), key=atom_key)
    constraints = [r for r in rules if r.is_constraint]
    found = set()
    for guess in _subsets(negated):
        guess = frozenset(guess)
        least = tp_lfp(gl_reduct(program, guess))
        if least & set(negated) != guess:
            continue
        if any(body_satisfied(c, least) for c in constraints):
            continue
        found.add(least)
    return found


def _answer_sets_flp(program, atoms, registry):
    atoms = sorted(atoms, key=atom_key)
    found = set()
    for candidate in _subsets(atoms):
        candidate = frozenset(candidate)
        if not is_model(program, candidate, registry):
            continue
        reduct = flp_reduct(program, candidate, registry)
        smaller = (
            frozenset(j) for j in _subsets(sorted(candidate, key=atom_key)) if len(j) < len(candidate)
        )
        if not any(is_model(reduct, j, registry) for j in smaller):
            found.add(candidate)
    return found


def has_answer_set(program, registry=None, limits=None):
    return bool(answer_sets_bruteforce(program, registry, limits))


def is_answer_set(program, interpretation, registry=None):
    """Direct FLP check of a single interpretation."""
    registry = registry_for(program, registry)
    program = _ground(program)
    interpretation = frozenset(interpretation)
    if not is_model(program, interpretation, registry):
        return False
    reduct = flp_reduct(program, interpretation, registry)
    for j in _subsets(sorted(interpretation, key=atom_key)):
        if len(j) < len(interpretation) and is_model(reduct, frozenset(j), registry):
            return False
    return True


def _check_domain(program, domain, limits):
    domain = frozenset(domain)
    limits.check('max_ir_domain', len(domain))
    heads = {a for r in _ground(program).rules for a in r.head}
    clash = domain & heads
    if clash:
        names = ', '.join(sorted(str(a) for a in clash))
        raise DomainError(f"domain atoms {names} occur in rule heads")
    return sorted(domain, key=atom_key)


def consistency_table(program, domain, registry=None, limits=None):
    """Bitmask over the sorted domain -> whether P u facts(F) is consistent."""
    limits = limits or get_limits()
    ordered = _check_domain(program, domain, limits)
    table = {}
    for mask in range(1 << len(ordered)):
        chosen = [a for i, a in enumerate(ordered) if mask >> i & 1]
        table[mask] = has_answer_set(program.extend(facts(chosen)), registry, limits)
    return ordered, table


def _all_inconsistent(ordered, table):
    full = (1 << len(ordered)) - 1

    @lru_cache(maxsize=None)
    def check(plus, minus):
        free = full & ~(plus | minus)
        if not free:
            return not table[plus]
        bit = free & -free
        return check(plus | bit, minus) and check(plus, minus | bit)

    return check


def _masks(ordered, reason):
    index = {a: i for i, a in enumerate(ordered)}
    unknown = reason.atoms - set(index)
    if unknown:
        raise DomainError(f"reason mentions atoms outside the domain: {sorted(str(a) for a in unknown)}")
    plus = sum(1 << index[a] for a in reason.r_plus)
    minus = sum(1 << index[a] for a in reason.r_minus)
    return plus, minus


def irs_bruteforce(program, domain, registry=None, limits=None):
    """Every inconsistency reason of the program over the domain."""
    ordered, table = consistency_table(program, domain, registry, limits)
    check = _all_inconsistent(ordered, table)
    found = set()
    n = len(ordered)
    for signs in _ternary(n):
        plus = sum(1 << i for i, s in enumerate(signs) if s == 1)
        minus = sum(1 << i for i, s in enumerate(signs) if s == 2)
        if check(plus, minus):
            found.add(InconsistencyReason(
                {ordered[i] for i in range(n) if plus >> i & 1},
                {ordered[i] for i in range(n) if minus >> i & 1},
            ))
    logger.debug("brute force found %d IRs over %d domain atoms", len(found), n)
    return found


def _ternary(n):
    if n == 0:
        yield ()
        return
    for rest in _ternary(n - 1):
        for sign in (0, 1, 2):
            yield rest + (sign,)


def is_ir_bruteforce(program, domain, reason, registry=None, limits=None):
    """Membership by enumeration of every F between R+ and D minus R-."""
    limits = limits or get_limits()
    ordered = _check_domain(program, domain, limits)
    _masks(ordered, reason)
    free = [a for a in ordered if a not in reason.atoms]
    for extra in _subsets(free):
        chosen = set(reason.r_plus) | set(extra)
        if has_answer_set(program.extend(facts(chosen)), registry, limits):
            return False
    return True


def is_minimal_ir(program, domain, reason, registry=None, limits=None, check=None):
    check = check or (lambda r: is_ir_bruteforce(program, domain, r, registry, limits))
    if not check(reason):
        raise AnalysisError(f"{reason} is not an inconsistency reason")
    for smaller in _one_step_shrinks(reason):
        if check(smaller):
            return False
    return True


def _one_step_shrinks(reason):
    for atom in sorted(reason.r_plus, key=atom_key):
        yield InconsistencyReason(reason.r_plus - {atom}, reason.r_minus)
    for atom in sorted(reason.r_minus, key=atom_key):
        yield InconsistencyReason(reason.r_plus, reason.r_minus - {atom})


def membership_program(program, domain, reason):
    """P u facts(R+) u {x <- not x~; x~ <- not x} for the atoms left open."""
    rules = list(facts(reason.r_plus))
    for atom in sorted(set(domain) - reason.atoms, key=atom_key):
        shadow = Atom('__open', (atom.as_term(),))
        rules.append(Rule((atom,), (neg(shadow),)))
        rules.append(Rule((shadow,), (neg(atom),)))
    return program.extend(rules)


def check_ir(program, domain, reason, consistent=None, registry=None, limits=None):
    """IR membership by a single consistency check of the membership program."""
    limits = limits or get_limits()
    ordered = _check_domain(program, domain, limits)
    _masks(ordered, reason)
    consistent = consistent or (lambda p: has_answer_set(p, registry, limits))
    return not consistent(membership_program(program, domain, reason))


def minimize_ir(program, domain, reason, check=None, registry=None, limits=None):
    """Greedy one-literal shrinking; the result is a subset-minimal IR."""
    check = check or (lambda r: check_ir(program, domain, r, registry=registry, limits=limits))
    changed = True
    while changed:
        changed = False
        for smaller in _one_step_shrinks(reason):
            if check(smaller):
                reason = smaller
                changed = True
                break
    return reason


def has_ir(program, domain, registry=None, limits=None):
    _, table = consistency_table(program, domain, registry, limits)
    return not all(table.values())


def is_unfounded_set(unfounded, program, interpretation, registry=None):
    registry = registry_for(program, registry)
    program = _ground(program)
    unfounded = frozenset(unfounded)
    interpretation = frozenset(interpretation)
    reduced = interpretation - unfounded
    for rule in program.rules:
        if not unfounded & set(rule.head):
            continue
        if not body_satisfied(rule, interpretation, registry):
            continue
        if not body_satisfied(rule, reduced, registry):
            continue
        if any(h in interpretation for h in rule.head if h not in unfounded):
            continue
        return False
    return True


def classical_models(program, extra_atoms=(), registry=None, limits=None):
    limits = limits or get_limits()
    registry = registry_for(program, registry)
    program = _ground(program)
    atoms = sorted(atoms_of(program) | set(extra_atoms), key=atom_key)
    limits.check('max_classical_atoms', len(atoms))
    for candidate in _subsets(atoms):
        candidate = frozenset(candidate)
        if is_model(program, candidate, registry):
            yield candidate


def check_ir_via_ufs(program, domain, reason, registry=None, limits=None):
    """
    Every classical model M either misses part of R+ or has a nonempty
    unfounded set inside M that avoids D minus R-.
    """
    limits = limits or get_limits()
    registry = registry_for(program, registry)
    program = _ground(program)
    protected = frozenset(domain) - reason.r_minus
    appearing = atoms_of(program)
    for model in classical_models(program, domain, registry, limits):
        if not reason.r_plus <= model:
            continue
        candidates = sorted((model - protected) & appearing, key=atom_key)
        if not any(
            is_unfounded_set(u, program, model, registry)
            for u in _subsets(candidates) if u
        ):
            return False
    return True


def check_ir_sufficient(program, domain, reason, registry=None, limits=None):
    """Sufficient condition only: no classical model contains R+ while avoiding R-."""
    for model in classical_models(program, domain, registry, limits):
        if reason.r_plus <= model and not model & reason.r_minus:
            return False
    return True
