"""
External atoms: oracle declarations, the registry that resolves them, and
the input/output learning function used by the solver.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from .ast import Atom, Constant, ExternalAtom, Function, atom_key
from .exceptions import ExternalArityError, UnknownExternal
from .nogoods import SignedLiteral

logger = logging.getLogger(__name__)

REPLACEMENT_PREFIX = '__e_'
NEGATED_REPLACEMENT_PREFIX = '__ne_'


@dataclass(frozen=True)
class ExternalDecl:
    """
    An oracle &name[p1..pk](c1..cm).

    ``evaluator(extensions, output)`` decides the external atom for the
    input extensions (one frozenset of atoms per input predicate) and a
    ground output tuple. ``outputs(extensions)`` lists the finitely many
    output tuples that evaluate to true. ``relevance(index, atom, output)``
    says whether an input atom can influence the given output tuple.
    """

    name: str
    input_arity: int
    output_arity: int
    monotone: tuple
    evaluator: Callable = field(compare=False)
    outputs: Optional[Callable] = field(default=None, compare=False)
    relevance: Optional[Callable] = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.monotone) != self.input_arity:
            raise ExternalArityError(f"&{self.name}: one monotonicity flag per input expected")

    def check_arity(self, external):
        if len(external.inputs) != self.input_arity:
            raise ExternalArityError(
                f"&{self.name} takes {self.input_arity} inputs, got {len(external.inputs)}"
            )
        if len(external.outputs) != self.output_arity:
            raise ExternalArityError(
                f"&{self.name} has {self.output_arity} outputs, got {len(external.outputs)}"
            )

    def is_relevant(self, index, atom, output):
        if self.relevance is None:
            return True
        return self.relevance(index, atom, output)

    def true_outputs(self, extensions):
        if self.outputs is not None:
            return set(self.outputs(extensions))
        if self.output_arity == 0:
            return {()} if self.evaluator(extensions, ()) else set()
        raise UnknownExternal(f"&{self.name} cannot enumerate its outputs")


def extensions_of(external, interpretation):
    """Input extensions of a ground external atom under a set of true atoms."""
    wanted = external.input_predicates
    buckets = {p: set() for p in wanted}
    for atom in interpretation:
        if atom.predicate in buckets:
            buckets[atom.predicate].add(atom)
    return tuple(frozenset(buckets[p]) for p in wanted)


def evaluate_external(decl, assignment, inputs, output):
    """Truth value of &decl[inputs](output) under a complete assignment."""
    external = ExternalAtom(decl.name, tuple(inputs), tuple(output))
    decl.check_arity(external)
    return decl.evaluator(extensions_of(external, assignment), tuple(output))


# builtin oracles

def _id(extensions, output):
    return bool(extensions[0])


def _neg(extensions, output):
    return not extensions[0]


def _diff_outputs(extensions):
    kept = {a.args for a in extensions[0] if len(a.args) == 1}
    removed = {a.args for a in extensions[1] if len(a.args) == 1}
    return kept - removed


def _diff(extensions, output):
    return tuple(output) in _diff_outputs(extensions)


def _diff_relevance(index, atom, output):
    return atom.args == tuple(output)


ID = ExternalDecl('id', 1, 0, (True,), _id)
NEG = ExternalDecl('neg', 1, 0, (False,), _neg)
DIFF = ExternalDecl('diff', 2, 1, (True, False), _diff, outputs=_diff_outputs, relevance=_diff_relevance)


def table_key(extensions):
    atoms = sorted((a for ext in extensions for a in ext), key=atom_key)
    return ','.join(str(a) for a in atoms)


def load_table_external(source, name, input_arity=1, monotone=None, output_arity=None):
    """
    Build an external from a table {input-atoms key -> list of output tuples}.
    Keys are the comma-joined sorted input atoms ('' for the empty input);
    a missing key means no output tuple is true. Without output_arity the
    arity is taken from the first row.
    """
    from .parser import parse_term

    if isinstance(source, (str, Path)):
        table = json.loads(Path(source).read_text(encoding='utf-8'))
    else:
        table = dict(source)
    parsed = {}
    for key, rows in table.items():
        tuples = set()
        for row in rows:
            row = [row] if isinstance(row, str) else list(row)
            if output_arity is None:
                output_arity = len(row)
            elif len(row) != output_arity:
                raise ExternalArityError(f"&{name}: table rows of different arity")
            tuples.add(tuple(parse_term(str(v)) for v in row))
        parsed[key] = frozenset(tuples)
    if monotone is None:
        monotone = (False,) * input_arity
    logger.debug("loaded table external &%s with %d keys", name, len(parsed))

    def outputs(extensions):
        return parsed.get(table_key(extensions), frozenset())

    def evaluator(extensions, output):
        return tuple(output) in outputs(extensions)

    return ExternalDecl(name, input_arity, output_arity or 0, tuple(monotone), evaluator, outputs=outputs)


def load_provider_external(source, name):
    """
    Monotone external &name[p](C) from a table {C -> list of providers}: C is
    true as soon as some p(x) holds with x a provider of C. Only the providers
    of C are relevant to C.
    """
    from .parser import parse_term

    if isinstance(source, (str, Path)):
        table = json.loads(Path(source).read_text(encoding='utf-8'))
    else:
        table = dict(source)
    providers = {
        parse_term(str(key)): frozenset(parse_term(str(v)) for v in values)
        for key, values in table.items()
    }
    logger.debug("loaded provider external &%s with %d outputs", name, len(providers))

    def outputs(extensions):
        present = {a.args[0] for a in extensions[0] if len(a.args) == 1}
        return {(c,) for c, members in providers.items() if members & present}

    def evaluator(extensions, output):
        return tuple(output) in outputs(extensions)

    def relevance(index, atom, output):
        return len(atom.args) == 1 and atom.args[0] in providers.get(output[0], ())

    return ExternalDecl(name, 1, 1, (True,), evaluator, outputs=outputs, relevance=relevance)


class ExternalRegistry:
    """Immutable name -> ExternalDecl mapping."""

    def __init__(self, decls=()):
        self._decls = {d.name: d for d in decls}

    @classmethod
    def default(cls):
        return cls((ID, NEG, DIFF))

    def with_decls(self, *decls):
        return ExternalRegistry(list(self._decls.values()) + [d for d in decls if d is not None])

    def with_tables(self, specs):
        """specs: iterable of (name, path-or-mapping, input_arity, monotone)."""
        return self.with_decls(*(load_table_external(src, name, arity, mono) for name, src, arity, mono in specs))

    def __contains__(self, name):
        return name in self._decls

    def names(self):
        return sorted(self._decls)

    def get(self, name):
        try:
            return self._decls[name]
        except KeyError:
            raise UnknownExternal(f"unknown external atom '&{name}'") from None

    def evaluate(self, external, interpretation):
        decl = self.get(external.name)
        decl.check_arity(external)
        return decl.evaluator(extensions_of(external, interpretation), tuple(external.outputs))

    def possible_outputs(self, external, extensions):
        decl = self.get(external.name)
        return decl.true_outputs(extensions)


def registry_for(program, registry=None):
    registry = registry or ExternalRegistry.default()
    return registry.with_decls(*program.external_decls)


def replacement_atoms(external):
    """The pair (e, ne) of ordinary atoms standing in for a ground external atom."""
    if external.inputs:
        tag = Function('in', tuple(external.inputs))
    else:
        tag = Constant('in')
    args = (tag,) + tuple(external.outputs)
    return (
        Atom(REPLACEMENT_PREFIX + external.name, args),
        Atom(NEGATED_REPLACEMENT_PREFIX + external.name, args),
    )


def is_replacement(atom):
    return atom.predicate.startswith(REPLACEMENT_PREFIX)


def external_of(atom):
    if not is_replacement(atom):
        raise UnknownExternal(f"'{atom}' is not a replacement atom")
    tag = atom.args[0]
    inputs = tag.args if isinstance(tag, Function) else ()
    return ExternalAtom(atom.predicate[len(REPLACEMENT_PREFIX):], tuple(inputs), tuple(atom.args[1:]))


def learn_io_nogoods(decl, external, assignment, known_atoms, outputs=None):
    """
    Input/output nogoods for the given output tuples of a ground external.

    Each nogood pairs the relevant input literals with the wrong truth value
    of the replacement atom: monotone inputs contribute their true atoms when
    the oracle says true and their false atoms when it says false,
    nonmonotone inputs contribute all of their literals.
    """
    decl.check_arity(external)
    extensions = extensions_of(external, assignment)
    predicates = external.input_predicates
    known_by_input = [sorted((a for a in known_atoms if a.predicate == p), key=atom_key) for p in predicates]
    if outputs is None:
        outputs = [tuple(external.outputs)]
    nogoods = set()
    for output in outputs:
        value = decl.evaluator(extensions, tuple(output))
        literals = set()
        for index, atoms in enumerate(known_by_input):
            for atom in atoms:
                if not decl.is_relevant(index, atom, tuple(output)):
                    continue
                holds = atom in assignment
                if decl.monotone[index] and holds != value:
                    continue
                literals.add(SignedLiteral(holds, atom))
        e, _ = replacement_atoms(ExternalAtom(external.name, external.inputs, tuple(output)))
        literals.add(SignedLiteral(not value, e))
        nogoods.add(frozenset(literals))
    return nogoods
