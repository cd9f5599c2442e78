"""
Meta-programs that decide consistency of a normal program inside ASP.

``build_m`` is the static saturation encoding, ``encode_ground`` and
``encode_nonground`` turn a program into the facts (resp. rules) it reads.
On top of these sit the query-atom rewriting and the program whose answer
sets enumerate the inconsistency reasons of a ground program.
"""

import logging
from dataclasses import dataclass, replace
from functools import lru_cache
from pathlib import Path

from .ast import (
    Atom, BodyLiteral, Conditional, Constant, Function, InconsistencyReason, Program, QueryAtom, Rule,
    Variable, atom_from_term, atom_key, facts, herbrand_universe, normalize_constraints, pos,
)
from .cdnl import solve_all
from .exceptions import DomainError, MetaEncodingError
from .grounder import _evaluate_builtins, ground_naive
from .limits import get_limits
from .parser import parse_file, parse_program
from .refsem import has_answer_set

logger = logging.getLogger(__name__)

NO_AS = 'noAS'

# The saturation encoding. A guessed interpretation together with a guessed
# derivation order either reproduces the least model of its reduct or
# derives noAS, after which every atom is saturated.
M_TEXT = """
atom(X) :- head(R,X).
atom(X) :- bodyP(R,X).
atom(X) :- bodyN(R,X).
rule(R) :- head(R,X).
rule(R) :- bodyP(R,X).
rule(R) :- bodyN(R,X).

true(X) v false(X) :- atom(X).

inReduct(R) :- rule(R), COND(false(X) : bodyN(R,X)).
outReduct(R) :- rule(R), bodyN(R,X), true(X).
derivationSeq(X,Y) v derivationSeq(Y,X) :- true(X), true(Y), X != Y.
derivationSeq(X,Z) :- derivationSeq(X,Y), derivationSeq(Y,Z).
derivationSeq(X1,X2) :- head(R,X1), inReduct(R), true(X1), COND(derivationSeq(Y,X1) : bodyP(R,Y)),
                        atom(X2), COND(derivationSeq(Y,X2) : bodyP(R,Y)), X2 > X1.
notApp(R) :- outReduct(R).
notApp(R) :- inReduct(R), bodyP(R,X), false(X).
notApp(R) :- head(R,X1), bodyP(R,X2), derivationSeq(X1,X2).
notApp(R) :- head(R,X), bodyP(R,X).
noAS :- true(X), COND(notApp(R) : head(R,X)).
noAS :- inReduct(R), head(R,X), false(X), COND(true(Y) : bodyP(R,Y)).

true(X) :- atom(X), noAS.
false(X) :- atom(X), noAS.
derivationSeq(X,Y) :- atom(X), atom(Y), noAS.
inReduct(R) :- rule(R), noAS.
outReduct(R) :- rule(R), noAS.
"""

# Per domain atom a: guess a in R+, in R- or open; open atoms are guessed
# once more (saturated) as present or absent input facts.
TAU_TEXT = """
rp(A) v rm(A) v rx(A) :- dom(A).
fin(A) :- rp(A).
fout(A) :- rm(A).
fin(A) v fout(A) :- rx(A).
fin(A) :- dom(A), noAS.
fout(A) :- dom(A), noAS.
head(s(A),A) :- fin(A).
notApp(s(A)) :- fout(A).
:- not noAS.
"""


@lru_cache(maxsize=1)
def build_m():
    return parse_program(M_TEXT, '<meta>')


def _rule_id(k, variables=()):
    if variables:
        return Function(f"r{k}", tuple(variables))
    return Constant(f"r{k}")


def _check_normal(program):
    for rule in program.rules:
        if rule.is_disjunctive:
            raise MetaEncodingError(f"rule '{rule}' is disjunctive")
        for literal in rule.body:
            if literal.kind not in ('ordinary', 'builtin'):
                raise MetaEncodingError(f"rule '{rule}' has a {literal.kind} literal")
        if rule.is_constraint:
            raise MetaEncodingError(f"constraint '{rule}' must be normalized first")


def encode_ground(program):
    """head/bodyP/bodyN facts of a ground normal program, rules named r1, r2, ..."""
    if not program.is_ground:
        raise MetaEncodingError("encode_ground needs a ground program")
    _check_normal(program)
    encoded = []
    for k, rule in enumerate(program.rules, start=1):
        rule = _evaluate_builtins(rule)
        if rule is None:
            continue
        rid = _rule_id(k)
        encoded.extend(Atom('head', (rid, h.as_term())) for h in rule.head)
        encoded.extend(Atom('bodyP', (rid, b.as_term())) for b in rule.positive_atoms)
        encoded.extend(Atom('bodyN', (rid, b.as_term())) for b in rule.negative_atoms)
    return Program(tuple(Rule((a,)) for a in encoded))


def _ordered_variables(rule):
    """Variables of a rule in order of first appearance."""
    found = []

    def walk(term):
        if isinstance(term, Variable):
            if term not in found:
                found.append(term)
        elif isinstance(term, Function):
            for arg in term.args:
                walk(arg)

    for atom in rule.head:
        for arg in atom.args:
            walk(arg)
    for literal in rule.body:
        payload = literal.payload
        terms = payload.args if literal.kind == 'ordinary' else (payload.lhs, payload.rhs)
        for term in terms:
            walk(term)
    return found


def _fresh_variables(rule, count):
    taken = {v.name for v in rule.variables()}
    names = []
    k = 0
    while len(names) < count:
        k += 1
        name = f"R_{k}"
        if name not in taken:
            names.append(Variable(name))
    return names


def encode_nonground(program):
    """
    One meta rule per head, positive and negative body atom of every rule:
    head(r(V), h) :- head(R_d, d) for the positive body atoms d.
    """
    _check_normal(program)
    encoded = []
    for k, rule in enumerate(program.rules, start=1):
        rid = _rule_id(k, _ordered_variables(rule))
        positive = rule.positive_atoms
        fresh = _fresh_variables(rule, len(positive))
        domain = [pos(Atom('head', (v, d.as_term()))) for v, d in zip(fresh, positive)]
        domain += [l for l in rule.body if l.kind == 'builtin']
        body = tuple(domain)
        encoded.extend(Rule((Atom('head', (rid, h.as_term())),), body) for h in rule.head)
        encoded.extend(Rule((Atom('bodyP', (rid, b.as_term())),), body) for b in positive)
        encoded.extend(Rule((Atom('bodyN', (rid, b.as_term())),), body) for b in rule.negative_atoms)
    return Program(tuple(encoded))


def encode(program, ground=None):
    """Encoding of a normal program: facts when it is ground (unless told otherwise), rules when not."""
    program = normalize_constraints(program)
    if ground is None:
        ground = program.is_ground
    return encode_ground(program) if ground else encode_nonground(program)


def meta_program(program, ground=None):
    return build_m().union(encode(program, ground))


def meta_answer_sets(program, ground=None, limits=None):
    """
    (consistent, projections): whether no answer set of the meta-program
    contains noAS, and the true/1 projections of the unsaturated ones.
    """
    answer_sets = solve_all(meta_program(program, ground), limits=limits)
    projections = set()
    saturated = 0
    for answer_set in answer_sets:
        if Atom(NO_AS) in answer_set:
            saturated += 1
            continue
        projections.add(frozenset(atom_from_term(a.args[0]) for a in answer_set if a.predicate == 'true'))
    logger.debug("meta-program: %d answer sets, %d saturated", len(answer_sets), saturated)
    return not saturated, projections


def check_inconsistency_meta(program, ground=None, limits=None):
    """True iff the program has no answer set, decided through the meta-program."""
    answer_sets = solve_all(meta_program(program, ground), limits=limits)
    return any(Atom(NO_AS) in a for a in answer_sets)


@dataclass(frozen=True)
class MetaNamespace:
    """Prefix that gives a copy of an encoding its own predicates."""

    tag: int

    @property
    def prefix(self):
        return f"__q{self.tag}_"

    def atom(self, atom):
        return Atom(self.prefix + atom.predicate, atom.args)

    def literal(self, literal):
        payload = literal.payload
        if literal.kind == 'ordinary':
            return BodyLiteral(self.atom(payload), literal.positive)
        if literal.kind == 'conditional':
            return BodyLiteral(Conditional(self.literal(payload.template), self.atom(payload.condition)))
        return literal

    def apply(self, program):
        rules = [
            Rule(tuple(self.atom(h) for h in r.head), tuple(self.literal(l) for l in r.body))
            for r in program.rules
        ]
        return program.with_rules(rules)

    @property
    def no_as(self):
        return Atom(self.prefix + NO_AS)


def complement(literal):
    return BodyLiteral(literal.payload, not literal.positive)


def query_program(query, subprogram):
    """S u {:- q} for cautious queries, S u {:- l~ | l in q} for brave ones."""
    if query.mode == 'cautious':
        extra = [Rule((), tuple(query.literals))]
    else:
        extra = [Rule((), (complement(l),)) for l in query.literals]
    return subprogram.extend(extra)


def _subprogram(query, subprograms):
    found = query.program
    if found is None and subprograms is not None:
        found = subprograms.get(query.subprogram)
    if found is None:
        raise MetaEncodingError(f"subprogram '{query.subprogram}' is not loaded")
    if found.has_queries:
        raise MetaEncodingError(f"subprogram '{query.subprogram}' contains query atoms")
    if not found.is_normal or not found.is_ordinary:
        raise MetaEncodingError(f"subprogram '{query.subprogram}' is not a normal ordinary program")
    return found


def _bridge(namespace, predicate, arity):
    """head(rin_p(X..), p(X..)) :- p(X..) inside the namespace."""
    variables = tuple(Variable(f"X{i}") for i in range(1, arity + 1))
    atom = Atom(predicate, variables)
    rid = Function(f"rin_{predicate}", variables) if variables else Constant(f"rin_{predicate}")
    return Rule((namespace.atom(Atom('head', (rid, atom.as_term()))),), (pos(atom),))


def rewrite_queries(program, subprograms=None):
    """
    Replace every query atom by the noAS atom of its own copy of the
    meta-program; the result is an ordinary (disjunctive) program.
    """
    queries = []
    for rule in program.rules:
        for literal in rule.body:
            if literal.kind == 'query' and literal.payload not in queries:
                queries.append(literal.payload)
    if not queries:
        return program
    extra = []
    replacement = {}
    arities = program.predicates()
    for tag, query in enumerate(queries, start=1):
        namespace = MetaNamespace(tag)
        sub = _subprogram(query, subprograms)
        encoded = build_m().union(encode_nonground(normalize_constraints(query_program(query, sub))))
        extra.extend(namespace.apply(encoded).rules)
        known = {**arities, **sub.predicates()}
        for predicate in query.inputs:
            if predicate not in known:
                raise MetaEncodingError(f"input predicate '{predicate}' of '{query}' is never used")
            extra.append(_bridge(namespace, predicate, known[predicate]))
        replacement[query] = namespace.no_as
    rules = []
    for rule in program.rules:
        body = []
        for literal in rule.body:
            if literal.kind != 'query':
                body.append(literal)
                continue
            query = literal.payload
            cautious = query.mode == 'cautious'
            body.append(BodyLiteral(replacement[query], cautious == literal.positive))
        rules.append(Rule(rule.head, tuple(body)))
    logger.debug("rewrote %d query atoms into %d meta rules", len(queries), len(extra))
    return Program(tuple(rules) + tuple(extra), external_decls=program.external_decls)


def query_entails(subprogram, mode, inputs, literals, registry=None, limits=None):
    """Brave or cautious entailment of a ground query by subprogram + input facts, by brute force."""
    query = QueryAtom(mode, '<direct>', (), tuple(literals))
    program = query_program(query, subprogram.extend(facts(inputs)))
    consistent = has_answer_set(program, registry, limits)
    return consistent if mode == 'brave' else not consistent


def load_program_with_queries(path):
    """Parse a file and attach the subprogram of each query atom, read relative to the file."""
    path = Path(path)
    program = parse_file(path)
    loaded = {}
    for query in program.query_decls:
        if query.subprogram in loaded:
            continue
        sub_path = (path.parent / query.subprogram).resolve()
        try:
            sub = parse_file(sub_path)
        except OSError as exc:
            raise MetaEncodingError(f"cannot read subprogram '{query.subprogram}': {exc}") from exc
        if sub.has_queries:
            raise MetaEncodingError(f"subprogram '{query.subprogram}' contains query atoms")
        loaded[query.subprogram] = sub
    rules = []
    for rule in program.rules:
        body = []
        for literal in rule.body:
            if literal.kind == 'query':
                query = replace(literal.payload, program=loaded[literal.payload.subprogram])
                literal = BodyLiteral(query, literal.positive)
            body.append(literal)
        rules.append(Rule(rule.head, tuple(body)))
    decls = tuple(replace(q, program=loaded[q.subprogram]) for q in program.query_decls)
    return replace(program, rules=tuple(rules), query_decls=decls)


def _ground_for_tau(program, domain):
    if program.is_ground:
        return program
    constants = herbrand_universe(program) | {t for a in domain for t in a.args}
    return ground_naive(program, constants)


def tau(domain, program):
    """Meta-program whose answer sets are the inconsistency reasons of the program over the domain."""
    program = normalize_constraints(_ground_for_tau(program, domain))
    _check_normal(program)
    domain = frozenset(domain)
    heads = program.heads() & domain
    if heads:
        raise DomainError(f"domain atoms occur in rule heads: {', '.join(sorted(map(str, heads)))}")
    dom = Program(tuple(Rule((Atom('dom', (a.as_term(),)),)) for a in sorted(domain, key=atom_key)))
    return build_m().union(encode_ground(program)).union(dom).union(parse_program(TAU_TEXT, '<tau>'))


def decode_reason(answer_set):
    plus = frozenset(atom_from_term(a.args[0]) for a in answer_set if a.predicate == 'rp')
    minus = frozenset(atom_from_term(a.args[0]) for a in answer_set if a.predicate == 'rm')
    return InconsistencyReason(plus, minus)


def enumerate_irs_tau(program, domain, registry=None, limits=None):
    """Every inconsistency reason, read off the answer sets of tau."""
    limits = limits or get_limits()
    limits.check('max_ir_domain', len(frozenset(domain)))
    answer_sets = solve_all(tau(domain, program), registry=registry, limits=limits)
    found = {decode_reason(a) for a in answer_sets}
    logger.debug("tau produced %d inconsistency reasons over %d domain atoms", len(found), len(domain))
    return found
