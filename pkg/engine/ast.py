"""
Symbolic core shared by every engine module: terms, atoms, body literals,
rules and programs, plus the structural rewrites that do not need a solver.

All values are immutable and hashable, so ground programs can be used as
dictionary keys and shared freely between threads.
"""

import re
from dataclasses import dataclass, field, replace
from typing import Any, Union

from .exceptions import NotGround

AUX_PREFIX = '__'

_NUMERAL = re.compile(r'-?\d+')


@dataclass(frozen=True)
class Constant:
    name: str

    def __str__(self):
        return self.name

    @property
    def is_numeral(self):
        return bool(_NUMERAL.fullmatch(self.name))


@dataclass(frozen=True)
class Variable:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Function:
    name: str
    args: tuple

    def __post_init__(self):
        if not self.args:
            raise ValueError(f"function term '{self.name}' needs arguments")

    def __str__(self):
        return f"{self.name}({','.join(str(a) for a in self.args)})"


Term = Union[Constant, Variable, Function]


def term_variables(term):
    if isinstance(term, Variable):
        return {term}
    if isinstance(term, Function):
        found = set()
        for arg in term.args:
            found |= term_variables(arg)
        return found
    return set()


def is_ground_term(term):
    if isinstance(term, Variable):
        return False
    if isinstance(term, Function):
        return all(is_ground_term(a) for a in term.args)
    return True


def term_depth(term):
    if isinstance(term, Function):
        return 1 + max(term_depth(a) for a in term.args)
    return 0


def substitute_term(term, theta):
    if isinstance(term, Variable):
        return theta.get(term, term)
    if isinstance(term, Function):
        return Function(term.name, tuple(substitute_term(a, theta) for a in term.args))
    return term


def term_key(term):
    """Total order on terms: numerals numerically, then constants by text, then functions."""
    if isinstance(term, Constant):
        if term.is_numeral:
            return (0, int(term.name), '')
        return (1, 0, term.name)
    if isinstance(term, Function):
        return (2, term.name, len(term.args), tuple(term_key(a) for a in term.args))
    return (3, term.name)


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple = ()

    def __str__(self):
        if not self.args:
            return self.predicate
        return f"{self.predicate}({','.join(str(a) for a in self.args)})"

    @property
    def arity(self):
        return len(self.args)

    @property
    def is_auxiliary(self):
        return self.predicate.startswith(AUX_PREFIX)

    @property
    def is_ground(self):
        return all(is_ground_term(a) for a in self.args)

    def variables(self):
        found = set()
        for arg in self.args:
            found |= term_variables(arg)
        return found

    def substitute(self, theta):
        if not self.args:
            return self
        return Atom(self.predicate, tuple(substitute_term(a, theta) for a in self.args))

    def as_term(self):
        """The atom read as a function term (predicates double as function symbols)."""
        if not self.args:
            return Constant(self.predicate)
        return Function(self.predicate, self.args)

    def depth(self):
        return max((term_depth(a) for a in self.args), default=0)


def atom_from_term(term):
    if isinstance(term, Constant):
        return Atom(term.name)
    if isinstance(term, Function):
        return Atom(term.name, term.args)
    raise NotGround(f"variable '{term}' cannot be read as an atom")


def atom_key(atom):
    return (atom.predicate, len(atom.args), tuple(term_key(a) for a in atom.args))


_COMPARATORS = {
    '=': lambda a, b: a == b,
    '!=': lambda a, b: a != b,
    '<': lambda a, b: term_key(a) < term_key(b),
    '>': lambda a, b: term_key(a) > term_key(b),
    '<=': lambda a, b: term_key(a) <= term_key(b),
    '>=': lambda a, b: term_key(a) >= term_key(b),
}


@dataclass(frozen=True)
class Builtin:
    lhs: Any
    op: str
    rhs: Any

    def __post_init__(self):
        if self.op not in _COMPARATORS:
            raise ValueError(f"unknown comparison '{self.op}'")

    def __str__(self):
        return f"{self.lhs} {self.op} {self.rhs}"

    def variables(self):
        return term_variables(self.lhs) | term_variables(self.rhs)

    def substitute(self, theta):
        return Builtin(substitute_term(self.lhs, theta), self.op, substitute_term(self.rhs, theta))

    def evaluate(self):
        if not (is_ground_term(self.lhs) and is_ground_term(self.rhs)):
            raise NotGround(f"comparison '{self}' is not ground")
        return _COMPARATORS[self.op](self.lhs, self.rhs)


@dataclass(frozen=True)
class ExternalAtom:
    name: str
    inputs: tuple = ()
    outputs: tuple = ()

    def __str__(self):
        ins = ','.join(str(t) for t in self.inputs)
        text = f"&{self.name}[{ins}]"
        if self.outputs:
            text += f"({','.join(str(t) for t in self.outputs)})"
        return text

    def variables(self):
        found = set()
        for term in self.inputs + self.outputs:
            found |= term_variables(term)
        return found

    @property
    def is_ground(self):
        return not self.variables()

    def substitute(self, theta):
        return ExternalAtom(
            self.name,
            tuple(substitute_term(t, theta) for t in self.inputs),
            tuple(substitute_term(t, theta) for t in self.outputs),
        )

    @property
    def input_predicates(self):
        return tuple(str(t) for t in self.inputs)


QUERY_MODES = {'brave': 'query_b', 'cautious': 'query_c'}


@dataclass(frozen=True)
class QueryAtom:
    mode: str
    subprogram: str
    inputs: tuple = ()
    literals: tuple = ()
    program: Any = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if self.mode not in QUERY_MODES:
            raise ValueError(f"unknown query mode '{self.mode}'")

    def __str__(self):
        head = f'"{self.subprogram}"'
        if self.inputs:
            head += f"; {','.join(self.inputs)}"
        lits = ', '.join(str(l) for l in self.literals)
        return f"&{QUERY_MODES[self.mode]}[{head}]({lits})"

    def variables(self):
        return set()

    def substitute(self, theta):
        return self


@dataclass(frozen=True)
class Conditional:
    template: Any
    condition: Atom

    def __str__(self):
        return f"COND({self.template} : {self.condition})"

    def variables(self):
        return self.template.variables() | self.condition.variables()

    def local_variables(self, global_vars):
        return self.condition.variables() - set(global_vars)

    def substitute(self, theta):
        return Conditional(self.template.substitute(theta), self.condition.substitute(theta))


@dataclass(frozen=True)
class BodyLiteral:
    payload: Any
    positive: bool = True

    def __post_init__(self):
        if isinstance(self.payload, Conditional) and not self.positive:
            raise ValueError("conditional literals only occur positively")

    @property
    def kind(self):
        if isinstance(self.payload, Atom):
            return 'ordinary'
        if isinstance(self.payload, ExternalAtom):
            return 'external'
        if isinstance(self.payload, Builtin):
            return 'builtin'
        if isinstance(self.payload, Conditional):
            return 'conditional'
        return 'query'

    def __str__(self):
        return str(self.payload) if self.positive else f"not {self.payload}"

    def variables(self):
        return self.payload.variables()

    def substitute(self, theta):
        return BodyLiteral(self.payload.substitute(theta), self.positive)


def pos(payload):
    return BodyLiteral(payload, True)


def neg(payload):
    return BodyLiteral(payload, False)


@dataclass(frozen=True)
class Rule:
    head: tuple = ()
    body: tuple = ()

    def __str__(self):
        head = ' v '.join(str(a) for a in self.head)
        if not self.body:
            return f"{head}."
        body = ', '.join(str(l) for l in self.body)
        if not self.head:
            return f":- {body}."
        return f"{head} :- {body}."

    @property
    def is_constraint(self):
        return not self.head

    @property
    def is_fact(self):
        return len(self.head) == 1 and not self.body

    @property
    def is_disjunctive(self):
        return len(self.head) > 1

    def literals(self, kind):
        return tuple(l for l in self.body if l.kind == kind)

    @property
    def positive_atoms(self):
        return tuple(l.payload for l in self.body if l.kind == 'ordinary' and l.positive)

    @property
    def negative_atoms(self):
        return tuple(l.payload for l in self.body if l.kind == 'ordinary' and not l.positive)

    @property
    def externals(self):
        return tuple(l.payload for l in self.body if l.kind == 'external')

    def global_variables(self):
        found = set()
        for atom in self.head:
            found |= atom.variables()
        for literal in self.body:
            if literal.kind != 'conditional':
                found |= literal.variables()
        return found

    def variables(self):
        found = self.global_variables()
        for literal in self.body:
            found |= literal.variables()
        return found

    @property
    def is_ground(self):
        return not self.variables()

    def substitute(self, theta):
        return Rule(
            tuple(a.substitute(theta) for a in self.head),
            tuple(l.substitute(theta) for l in self.body),
        )


def unsafe_variables(rule):
    """Global variables not bound by a positive ordinary atom or an external output."""
    bound = set()
    for literal in rule.body:
        if literal.kind == 'ordinary' and literal.positive:
            bound |= literal.payload.variables()
    changed = True
    while changed:
        changed = False
        for literal in rule.body:
            if literal.kind != 'external' or not literal.positive:
                continue
            ext = literal.payload
            input_vars = set()
            for term in ext.inputs:
                input_vars |= term_variables(term)
            if input_vars <= bound:
                out_vars = set()
                for term in ext.outputs:
                    out_vars |= term_variables(term)
                if not out_vars <= bound:
                    bound |= out_vars
                    changed = True
    unsafe = rule.global_variables() - bound
    for literal in rule.body:
        if literal.kind == 'conditional':
            cond = literal.payload
            local = cond.condition.variables() | bound
            unsafe |= cond.template.variables() - local
    return unsafe


Interpretation = frozenset


@dataclass(frozen=True)
class Program:
    rules: tuple = ()
    external_decls: tuple = ()
    query_decls: tuple = ()
    unit_markers: tuple = ()

    def __str__(self):
        return render(self)

    def __iter__(self):
        return iter(self.rules)

    def __len__(self):
        return len(self.rules)

    def heads(self):
        return {a for r in self.rules for a in r.head}

    def positive_body(self):
        return {a for r in self.rules for a in r.positive_atoms}

    def negative_body(self):
        return {a for r in self.rules for a in r.negative_atoms}

    def predicates(self):
        arities = {}
        for rule in self.rules:
            atoms = list(rule.head) + list(rule.positive_atoms) + list(rule.negative_atoms)
            for atom in atoms:
                arities.setdefault(atom.predicate, atom.arity)
        return arities

    @property
    def is_ground(self):
        return all(r.is_ground for r in self.rules)

    @property
    def is_normal(self):
        return all(len(r.head) <= 1 for r in self.rules)

    @property
    def is_ordinary(self):
        return not any(l.kind in ('external', 'query') for r in self.rules for l in r.body)

    @property
    def has_queries(self):
        return any(l.kind == 'query' for r in self.rules for l in r.body)

    def with_rules(self, rules, keep_markers=False):
        return replace(self, rules=tuple(rules), unit_markers=self.unit_markers if keep_markers else ())

    def extend(self, rules):
        return replace(self, rules=self.rules + tuple(rules))

    def union(self, other):
        return Program(
            self.rules + other.rules,
            external_decls=self.external_decls + other.external_decls,
            query_decls=self.query_decls + other.query_decls,
        )


def facts(atoms):
    return tuple(Rule((a,)) for a in sorted(atoms, key=atom_key))


def _body_atoms(literal):
    if literal.kind == 'ordinary':
        return [literal.payload]
    if literal.kind == 'conditional':
        cond = literal.payload
        atoms = [cond.condition]
        if cond.template.kind == 'ordinary':
            atoms.append(cond.template.payload)
        return atoms
    return []


def atoms_of(program):
    """Ordinary atoms in heads and bodies of a ground program, auxiliaries included."""
    found = set()
    for rule in program.rules:
        if not rule.is_ground:
            raise NotGround(f"rule '{rule}' is not ground")
        found.update(rule.head)
        for literal in rule.body:
            found.update(_body_atoms(literal))
    return found


def _constants(term, found):
    if isinstance(term, Constant):
        found.add(term)
    elif isinstance(term, Function):
        for arg in term.args:
            _constants(arg, found)


def herbrand_universe(program):
    found = set()
    for rule in program.rules:
        atoms = list(rule.head)
        for literal in rule.body:
            atoms.extend(_body_atoms(literal))
            if literal.kind == 'builtin':
                _constants(literal.payload.lhs, found)
                _constants(literal.payload.rhs, found)
            elif literal.kind == 'external':
                for term in literal.payload.outputs:
                    _constants(term, found)
        for atom in atoms:
            for arg in atom.args:
                _constants(arg, found)
    return found


def normalize_constraints(program):
    """Replace every constraint :- B by f :- B, not f with a fresh auxiliary f."""
    used = {a.predicate for r in program.rules for a in r.head}
    used |= {a.predicate for r in program.rules for a in r.positive_atoms + r.negative_atoms}
    rules = []
    k = 0
    for rule in program.rules:
        if not rule.is_constraint:
            rules.append(rule)
            continue
        k += 1
        while f"{AUX_PREFIX}c{k}" in used:
            k += 1
        fresh = Atom(f"{AUX_PREFIX}c{k}")
        rules.append(Rule((fresh,), rule.body + (neg(fresh),)))
    return replace(program, rules=tuple(rules))


def project(interpretation):
    return frozenset(a for a in interpretation if not a.is_auxiliary)


def render_interpretation(interpretation):
    return '{' + ', '.join(sorted(str(a) for a in interpretation)) + '}'


def render(program):
    lines = []
    markers = set(program.unit_markers)
    for index, rule in enumerate(program.rules):
        if index in markers and index > 0:
            lines.append('#split.')
        lines.append(str(rule))
    return '\n'.join(lines) + ('\n' if lines else '')


@dataclass(frozen=True)
class InconsistencyReason:
    """A pair (R+, R-) of disjoint atom sets over an input domain."""

    r_plus: frozenset = frozenset()
    r_minus: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, 'r_plus', frozenset(self.r_plus))
        object.__setattr__(self, 'r_minus', frozenset(self.r_minus))
        if self.r_plus & self.r_minus:
            raise ValueError("R+ and R- must be disjoint")

    def __str__(self):
        return f"IR: +{render_interpretation(self.r_plus)} -{render_interpretation(self.r_minus)}"

    @property
    def atoms(self):
        return self.r_plus | self.r_minus

    def as_constraint(self):
        """The constraint :- R+, not R- that the reason justifies."""
        body = tuple(pos(a) for a in sorted(self.r_plus, key=atom_key))
        body += tuple(neg(a) for a in sorted(self.r_minus, key=atom_key))
        return Rule((), body)
