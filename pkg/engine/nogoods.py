"""
Translation of ground programs into nogoods.

A nogood is a frozenset of SignedLiteral values; an assignment is a solution
when no nogood is entirely contained in it. Variables are ordinary atoms and
body auxiliaries, one per distinct rule body.
"""

import logging
from dataclasses import dataclass

from .ast import Atom, atom_key
from .exceptions import NotGround, UnsupportedProgram

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Body:
    """Auxiliary variable standing for the conjunction of a rule body."""

    literals: frozenset

    def __str__(self):
        parts = sorted(str(a) if positive else f"not {a}" for a, positive in self.literals)
        return 'B{' + ', '.join(parts) + '}'

    @property
    def positive(self):
        return tuple(sorted((a for a, p in self.literals if p), key=atom_key))

    @property
    def negative(self):
        return tuple(sorted((a for a, p in self.literals if not p), key=atom_key))


@dataclass(frozen=True)
class SignedLiteral:
    sign: bool
    var: object

    def __str__(self):
        return f"{'T' if self.sign else 'F'} {self.var}"

    def complement(self):
        return SignedLiteral(not self.sign, self.var)


def T(var):
    return SignedLiteral(True, var)


def F(var):
    return SignedLiteral(False, var)


def var_key(var):
    """Order used for decisions: bodies by rendering first, then atoms."""
    if isinstance(var, Body):
        return (0, str(var))
    return (1, atom_key(var))


def nogood_key(nogood):
    return tuple(sorted((var_key(l.var), l.sign) for l in nogood))


def render_nogood(nogood):
    return '{' + ', '.join(str(l) for l in sorted(nogood, key=lambda l: (var_key(l.var), l.sign))) + '}'


def body_of(rule):
    literals = set()
    for literal in rule.body:
        if literal.kind != 'ordinary':
            raise UnsupportedProgram(f"rule '{rule}' still has {literal.kind} literals")
        literals.add((literal.payload, literal.positive))
    return Body(frozenset(literals))


def _check(program):
    for rule in program.rules:
        if not rule.is_ground:
            raise NotGround(f"rule '{rule}' is not ground")


def shift(program):
    """Each disjunctive rule h1 v .. v hk :- B becomes hi :- B, not hj (j != i)."""
    from .ast import Rule, neg

    rules = []
    for rule in program.rules:
        if not rule.is_disjunctive:
            rules.append(rule)
            continue
        for head in rule.head:
            others = tuple(neg(h) for h in rule.head if h != head)
            rules.append(Rule((head,), rule.body + others))
    return program.with_rules(rules)


def body_nogoods(body):
    """beta <-> conjunction of the body literals."""
    found = set()
    for atom, positive in body.literals:
        found.add(frozenset({T(body), SignedLiteral(not positive, atom)}))
    found.add(frozenset({F(body)} | {SignedLiteral(positive, atom) for atom, positive in body.literals}))
    return found


def singleton_loop_nogoods(program):
    """For every atom a: {T a, F beta_1, ..., F beta_k} over its defining bodies."""
    _check(program)
    support = {}
    facts = set()
    for rule in shift(program).rules:
        for head in rule.head:
            if rule.is_fact:
                facts.add(head)
            support.setdefault(head, set()).add(body_of(rule))
    for rule in program.rules:
        for literal in rule.body:
            if literal.kind == 'ordinary':
                support.setdefault(literal.payload, set())
    found = set()
    for atom, bodies in support.items():
        if atom in facts:
            continue
        found.add(frozenset({T(atom)} | {F(b) for b in bodies}))
    return found


def unfounded_set_nogood(program, interpretation, unfounded):
    """
    Loop nogood of a set of atoms unfounded under an interpretation of an
    ordinary program: one atom of the set true and, for every rule that could
    support it from outside, a false body literal or another true head atom.
    """
    unfounded = frozenset(unfounded)
    found = {T(min(unfounded, key=atom_key))}
    for rule in program.rules:
        if not any(h in unfounded for h in rule.head):
            continue
        if any(l.positive and l.payload in unfounded for l in rule.body if l.kind == 'ordinary'):
            continue
        witness = None
        for literal in rule.body:
            if literal.kind != 'ordinary':
                raise UnsupportedProgram(f"unfounded set nogood over non-ordinary rule '{rule}'")
            if literal.positive and literal.payload not in interpretation:
                witness = F(literal.payload)
                break
            if not literal.positive and literal.payload in interpretation:
                witness = T(literal.payload)
                break
        if witness is None:
            others = sorted((h for h in rule.head if h in interpretation and h not in unfounded), key=atom_key)
            if not others:
                raise ValueError(f"{sorted(map(str, unfounded))} is supported by '{rule}'")
            witness = T(others[0])
        found.add(witness)
    return frozenset(found)


def clark_completion(program):
    """
    Completion nogoods of a ground program: body definitions, head support,
    facts, constraints and singleton loop nogoods. Disjunctive rules are
    shifted and additionally contribute the clause {F h1, .., F hk, T beta}.
    """
    _check(program)
    found = set()
    for rule in program.rules:
        if rule.is_fact:
            found.add(frozenset({F(rule.head[0])}))
            continue
        body = body_of(rule)
        found |= body_nogoods(body)
        if rule.is_constraint:
            found.add(frozenset({T(body)}))
        elif rule.is_disjunctive:
            found.add(frozenset({F(h) for h in rule.head} | {T(body)}))
    for rule in shift(program).rules:
        if rule.is_fact or rule.is_constraint:
            continue
        body = body_of(rule)
        found |= body_nogoods(body)
        found.add(frozenset({F(rule.head[0]), T(body)}))
    found |= singleton_loop_nogoods(program)
    logger.debug("completion of %d rules gave %d nogoods", len(program.rules), len(found))
    return found


class SymbolTable:
    """Maps atoms and bodies onto solver variables 1..n."""

    def __init__(self):
        self._index = {}
        self._vars = [None]

    def __len__(self):
        return len(self._vars) - 1

    def __contains__(self, var):
        return var in self._index

    def intern(self, var):
        index = self._index.get(var)
        if index is None:
            index = len(self._vars)
            self._index[var] = index
            self._vars.append(var)
        return index

    def index(self, var):
        return self._index[var]

    def var(self, index):
        return self._vars[index]

    def encode(self, literal):
        index = self.intern(literal.var)
        return index if literal.sign else -index

    def decode(self, code):
        return SignedLiteral(code > 0, self._vars[abs(code)])

    def atoms(self):
        return [v for v in self._vars[1:] if isinstance(v, Atom)]

    def indices(self):
        return range(1, len(self._vars))
