"""
Grounding.

``ground_naive`` substitutes constants for variables in every possible way.
``instantiate`` (and ``pog`` on top of it) only builds rule instances whose
positive body atoms are possibly derivable from the input facts, evaluates
external atoms to find invented values, and expands conditional literals
once the extensions of their conditions are known.
"""

import logging
from itertools import chain, combinations, product

from .ast import (
    Atom, BodyLiteral, Conditional, Constant, Function, Program, Rule, Variable, atom_key, herbrand_universe,
    is_ground_term, neg, pos, term_key,
)
from .exceptions import GroundingError
from .externals import registry_for
from .limits import get_limits
from .refsem import tp_lfp

logger = logging.getLogger(__name__)

COND_PREFIX = '__cond'


def match_term(pattern, term, theta):
    if isinstance(pattern, Variable):
        bound = theta.get(pattern)
        if bound is None:
            extended = dict(theta)
            extended[pattern] = term
            return extended
        return theta if bound == term else None
    if isinstance(pattern, Function):
        if not isinstance(term, Function) or term.name != pattern.name or len(term.args) != len(pattern.args):
            return None
        for p, t in zip(pattern.args, term.args):
            theta = match_term(p, t, theta)
            if theta is None:
                return None
        return theta
    return theta if pattern == term else None


def match_atom(pattern, atom, theta):
    if pattern.predicate != atom.predicate or len(pattern.args) != len(atom.args):
        return None
    for p, t in zip(pattern.args, atom.args):
        theta = match_term(p, t, theta)
        if theta is None:
            return None
    return theta


def _sorted_vars(variables):
    return sorted(variables, key=lambda v: v.name)


def _evaluate_builtins(rule):
    body = []
    for literal in rule.body:
        if literal.kind == 'builtin':
            if literal.payload.evaluate() != literal.positive:
                return None
            continue
        body.append(literal)
    return Rule(rule.head, tuple(body))


def _dedupe(literals):
    seen = set()
    kept = []
    for literal in literals:
        if literal not in seen:
            seen.add(literal)
            kept.append(literal)
    return tuple(kept)


def _ground_conditionals_naive(rule, constants):
    body = []
    for literal in rule.body:
        if literal.kind != 'conditional':
            body.append(literal)
            continue
        cond = literal.payload
        local = _sorted_vars(cond.variables())
        for values in product(constants, repeat=len(local)):
            theta = dict(zip(local, values))
            template = cond.template.substitute(theta)
            condition = cond.condition.substitute(theta)
            if template.kind == 'builtin':
                if template.payload.evaluate() == template.positive:
                    continue
                body.append(neg(condition))
                continue
            body.append(BodyLiteral(Conditional(template, condition)))
    return Rule(rule.head, _dedupe(body))


def ground_naive(program, constants, registry=None, limits=None):
    """Every rule under every substitution of its variables by the given constants."""
    limits = limits or get_limits()
    constants = sorted(set(constants), key=term_key)
    rules = []
    for rule in program.rules:
        variables = _sorted_vars(rule.global_variables())
        if (variables or not rule.is_ground) and not constants:
            raise GroundingError(f"no constants to ground '{rule}'")
        for values in product(constants, repeat=len(variables)):
            instance = _evaluate_builtins(rule.substitute(dict(zip(variables, values))))
            if instance is None:
                continue
            instance = _ground_conditionals_naive(instance, constants)
            rules.append(instance)
            limits.check('max_ground_rules', len(rules))
    logger.debug("naive grounding produced %d rules over %d constants", len(rules), len(constants))
    return program.with_rules(_dedupe(rules))


def _subsets(items):
    items = list(items)
    return chain.from_iterable(combinations(items, k) for k in range(len(items) + 1))


def _constants_of_atoms(atoms):
    found = set()

    def collect(term):
        if isinstance(term, Constant):
            found.add(term)
        elif isinstance(term, Function):
            for arg in term.args:
                collect(arg)

    for atom in atoms:
        for arg in atom.args:
            collect(arg)
    return found


class Instantiator:
    """Fixpoint instantiation driven by possibly derivable atoms."""

    def __init__(self, program, facts=(), constants=None, registry=None, liberal=False, limits=None,
                 open_atoms=()):
        self.program = program
        self.facts = frozenset(facts)
        # possibly true input atoms that are neither facts nor certain
        self.open_atoms = frozenset(open_atoms) - self.facts
        self.constants = None if constants is None else frozenset(constants)
        self.registry = registry_for(program, registry)
        self.liberal = liberal
        self.limits = limits or get_limits()
        self.universe = sorted(
            herbrand_universe(program) | _constants_of_atoms(self.facts | self.open_atoms) | set(constants or ()),
            key=term_key,
        )
        self.possible = set(self.facts) | set(self.open_atoms)
        self.certain = set(self.facts)
        self.instances = {}
        self.extensions_evaluated = 0
        self._outputs = {}
        self._aux = {}
        self._enumerated_open = set()

    def run(self):
        """
        Instantiate to a fixpoint. Nonmonotone inputs range over the atoms
        not yet known to be certain; when one of those later turns out
        certain, instantiation starts over with the larger certain set.
        """
        passes = 0
        while True:
            passes += 1
            rounds = self._fixpoint()
            if not self._enumerated_open & self.certain:
                break
            self.possible = set(self.facts) | set(self.open_atoms)
            self.instances = {}
            self._aux = {}
            self._enumerated_open = set()
        logger.debug(
            "instantiated %d rules in %d passes, %d rounds (%d possible, %d certain atoms)",
            len(self.instances), passes, rounds, len(self.possible), len(self.certain),
        )
        return self

    def _fixpoint(self):
        rounds = 0
        while True:
            rounds += 1
            state = (len(self.possible), len(self.certain))
            self._outputs = {}
            index = self._index(self.possible)
            for position, rule in enumerate(self.program.rules):
                for theta in self._matches(rule, index):
                    instance = self.instance(rule, theta)
                    if instance is None or instance in self.instances:
                        continue
                    self.instances[instance] = (position, len(self.instances))
                    self.limits.check('max_ground_rules', len(self.instances))
                    for atom in instance.head:
                        self._add_possible(atom)
            self.certain |= self._certain()
            if (len(self.possible), len(self.certain)) == state:
                return rounds

    def _add_possible(self, atom):
        if atom.depth() > self.limits.max_term_depth:
            raise GroundingError(f"term depth of '{atom}' exceeds {self.limits.max_term_depth}")
        self.possible.add(atom)

    @staticmethod
    def _index(atoms):
        index = {}
        for atom in sorted(atoms, key=atom_key):
            index.setdefault((atom.predicate, atom.arity), []).append(atom)
        return index

    def _matches(self, rule, index):
        atoms = rule.positive_atoms
        externals = [l.payload for l in rule.body if l.kind == 'external' and l.positive]
        if rule.is_constraint and rule.is_ground:
            # ground constraints survive even with an underivable body
            yield from self._bind_externals(externals, 0, {})
            return

        def join(i, theta):
            if i == len(atoms):
                yield from self._bind_externals(externals, 0, theta)
                return
            pattern = atoms[i].substitute(theta)
            for atom in index.get((pattern.predicate, pattern.arity), ()):
                extended = match_atom(pattern, atom, theta)
                if extended is not None:
                    yield from join(i + 1, extended)

        yield from join(0, {})

    def _bind_externals(self, externals, i, theta):
        if i == len(externals):
            yield theta
            return
        external = externals[i].substitute(theta)
        if not all(is_ground_term(t) for t in external.inputs):
            raise GroundingError(f"inputs of '{external}' are not ground")
        if external.is_ground:
            yield from self._bind_externals(externals, i + 1, theta)
            return
        for output in sorted(self._output_tuples(external), key=lambda t: tuple(term_key(x) for x in t)):
            extended = theta
            for pattern, value in zip(external.outputs, output):
                extended = match_term(pattern, value, extended)
                if extended is None:
                    break
            if extended is not None:
                yield from self._bind_externals(externals, i + 1, extended)

    def _input_extensions(self, decl, predicates):
        choices = []
        for index, predicate in enumerate(predicates):
            possible = frozenset(a for a in self.possible if a.predicate == predicate)
            if decl.monotone[index]:
                choices.append([possible])
                continue
            certain = frozenset(a for a in self.certain if a.predicate == predicate)
            open_atoms = sorted(possible - certain, key=atom_key)
            self._enumerated_open.update(open_atoms)
            self.limits.check('max_input_extensions', 1 << len(open_atoms))
            choices.append([certain | frozenset(s) for s in _subsets(open_atoms)])
        return product(*choices)

    def _output_tuples(self, external):
        key = (external.name, external.inputs)
        if key in self._outputs:
            return self._outputs[key]
        decl = self.registry.get(external.name)
        decl.check_arity(external)
        found = set()
        count = 0
        for extensions in self._input_extensions(decl, external.input_predicates):
            count += 1
            self.limits.check('max_input_extensions', count)
            found |= set(decl.true_outputs(tuple(extensions)))
        self.extensions_evaluated += count
        if self.liberal:
            found |= set(product(self.universe, repeat=decl.output_arity))
        self._outputs[key] = found
        return found

    def instance(self, rule, theta):
        """Ground instance under a substitution, or None when a builtin fails or a value is not allowed."""
        if self.constants is not None and any(v not in self.constants for v in theta.values()):
            return None
        instance = rule.substitute(theta)
        for literal in instance.body:
            if literal.kind not in ('conditional', 'query') and literal.variables():
                raise GroundingError(f"rule '{rule}' is not safe")
        for atom in instance.head:
            if not atom.is_ground:
                raise GroundingError(f"rule '{rule}' is not safe")
        instance = _evaluate_builtins(instance)
        if instance is None:
            return None
        return Rule(instance.head, _dedupe(instance.body))

    def _certain(self):
        definite = [
            r for r in self.instances
            if len(r.head) == 1 and all(l.kind == 'ordinary' and l.positive for l in r.body)
        ]
        return set(self.facts) | set(tp_lfp(Program(tuple(definite))))

    def _aux_atom(self, template, condition):
        key = (template, condition)
        atom = self._aux.get(key)
        if atom is None:
            atom = Atom(COND_PREFIX, (Constant(str(len(self._aux) + 1)),))
            self._aux[key] = atom
        return atom

    def expand(self, rule, index=None):
        """Replace conditional literals using the computed possible/certain atoms."""
        body = []
        if index is None:
            index = self._index(self.possible)
        for literal in rule.body:
            if literal.kind != 'conditional':
                body.append(literal)
                continue
            cond = literal.payload
            pattern = cond.condition
            for atom in index.get((pattern.predicate, pattern.arity), ()):
                theta = match_atom(pattern, atom, {})
                if theta is None:
                    continue
                template = cond.template.substitute(theta)
                if template.variables():
                    raise GroundingError(f"conditional '{cond}' leaves variables unbound")
                if template.kind == 'builtin':
                    if template.payload.evaluate() == template.positive:
                        continue
                    if atom in self.certain:
                        return None
                    body.append(neg(atom))
                elif atom in self.certain:
                    body.append(template)
                else:
                    body.append(pos(self._aux_atom(template, atom)))
        return Rule(rule.head, _dedupe(body))

    def program_out(self):
        ordered = sorted(self.instances, key=lambda r: self.instances[r])
        rules = [Rule((a,)) for a in sorted(self.facts, key=atom_key)]
        seen = set(rules)
        index = self._index(self.possible)
        for instance in ordered:
            expanded = self.expand(instance, index)
            if expanded is not None and expanded not in seen:
                seen.add(expanded)
                rules.append(expanded)
        for (template, condition), aux in self._aux.items():
            rules.append(Rule((aux,), (template,)))
            rules.append(Rule((aux,), (neg(condition),)))
        return self.program.with_rules(rules)


def instantiate(program, facts=(), constants=None, registry=None, liberal=False, limits=None):
    return Instantiator(program, facts, constants, registry, liberal, limits).run().program_out()


def possible_atoms(program, facts=(), registry=None, liberal=False):
    return frozenset(Instantiator(program, facts, registry=registry, liberal=liberal).run().possible)


def certain_atoms(program, facts=(), registry=None, liberal=False):
    return frozenset(Instantiator(program, facts, registry=registry, liberal=liberal).run().certain)


def pog(program, facts=(), constants=None, registry=None, liberal=False, limits=None):
    """
    Partially optimized grounding: only instances whose positive body can be
    derived from the facts survive. Rules are never rewritten or added
    (conditional literals aside).
    """
    return instantiate(program, facts, constants, registry, liberal, limits)


def ground_program(program, facts=(), registry=None, liberal=False, limits=None):
    """Ground any program for solving; a ground input is returned as is."""
    if program.is_ground and not any(l.kind == 'conditional' for r in program.rules for l in r.body):
        if facts:
            return program.extend(Rule((a,)) for a in sorted(facts, key=atom_key))
        return program
    return instantiate(program, facts, registry=registry, liberal=liberal, limits=limits)


def expand_conditional(rule, extension_of):
    """Replace each COND(lit : cond) by the lit-instances over cond's extension."""
    body = []
    for literal in rule.body:
        if literal.kind != 'conditional':
            body.append(literal)
            continue
        cond = literal.payload
        predicate = cond.condition.predicate
        if predicate not in extension_of:
            raise GroundingError(f"no extension given for condition predicate '{predicate}'")
        for atom in sorted(extension_of[predicate], key=atom_key):
            theta = match_atom(cond.condition, atom, {})
            if theta is None:
                continue
            template = cond.template.substitute(theta)
            if template.kind == 'builtin' and template.payload.evaluate() == template.positive:
                continue
            body.append(template)
    return Rule(rule.head, _dedupe(body))
