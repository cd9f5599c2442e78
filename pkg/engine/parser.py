"""
Parser and printer for the program dialect.

    program   := (rule | "#split.")*
    rule      := head? (":-" body)? "."
    head      := atom (("v" | "|") atom)*
    body      := literal ("," literal)*
    literal   := "not"? (atom | external | query) | term CMP term | COND(literal : atom)

External atoms are written ``&name[in,...](out,...)`` and query atoms
``&query_c["sub.lp"; p1,p2](a, not b)`` (``&query_b`` for brave queries).
"""

import logging
from pathlib import Path

import lark
from lark import Transformer, v_args

from .ast import (
    Atom, BodyLiteral, Builtin, Conditional, Constant, ExternalAtom, Function,
    Program, QueryAtom, Rule, Variable, atom_from_term, is_ground_term, unsafe_variables,
)
from .exceptions import ArityError, ParseError, SafetyError, SourceSpan

logger = logging.getLogger(__name__)

GRAMMAR = r"""
    start: statement*

    ?statement: rule
              | SPLIT "." -> split

    rule: head ":-" body "."      -> full_rule
        | head "."                -> fact_rule
        | ":-" body "."           -> constraint

    head: atom (DISJ atom)*
    body: literal ("," literal)*

    ?literal: NOT? element         -> literal
            | term CMP term        -> builtin
            | COND "(" literal ":" atom ")" -> conditional

    ?element: atom
            | external

    atom: IDENT ("(" terms ")")?

    external: "&" IDENT "[" ext_inputs "]" ("(" ext_outputs? ")")?
    ext_inputs: STRING (";" terms?)?  -> query_inputs
              | terms?                -> plain_inputs
    ext_outputs: ext_output ("," ext_output)*
    ext_output: NOT? term

    terms: term ("," term)*
    ?term: VAR                     -> variable
         | IDENT "(" terms ")"     -> function
         | IDENT                   -> constant
         | NUMBER                  -> constant

    SPLIT: "#split"
    DISJ.2: /v(?![A-Za-z0-9_'])/ | "|"
    NOT.2: /not(?![A-Za-z0-9_'])/
    COND.3: /COND(?=\s*\()/
    CMP: "!=" | "<=" | ">=" | "=" | "<" | ">"
    VAR: /[A-Z][A-Za-z0-9_']*/
    IDENT: /[a-z_][A-Za-z0-9_']*/
    NUMBER: /-?\d+/
    STRING: /"[^"]*"/

    COMMENT: /%[^\n]*/
    %import common.WS
    %ignore WS
    %ignore COMMENT
"""

_parser = lark.Lark(GRAMMAR, parser='lalr', propagate_positions=True, maybe_placeholders=False)


class _Split:
    pass


class _Located:
    def __init__(self, rule, span):
        self.rule = rule
        self.span = span


def _span(meta, source):
    return SourceSpan(source, getattr(meta, 'line', 1) or 1, getattr(meta, 'column', 1) or 1)


class ProgramBuilder(Transformer):
    """Turns the lark parse tree into ast values."""

    def __init__(self, source):
        super().__init__()
        self.source = source
        # start position of each rule, in program order
        self.spans = []

    def start(self, statements):
        rules = []
        markers = []
        for statement in statements:
            if isinstance(statement, _Split):
                if rules and (not markers or markers[-1] != len(rules)):
                    markers.append(len(rules))
            else:
                rules.append(statement.rule)
                self.spans.append(statement.span)
        markers = [m for m in markers if m < len(rules)]
        queries = []
        for rule in rules:
            for literal in rule.body:
                if literal.kind == 'query' and literal.payload not in queries:
                    queries.append(literal.payload)
        return Program(tuple(rules), query_decls=tuple(queries), unit_markers=tuple(markers))

    def split(self, _):
        return _Split()

    @v_args(meta=True)
    def full_rule(self, meta, children):
        return _Located(Rule(tuple(children[0]), tuple(children[1])), _span(meta, self.source))

    @v_args(meta=True)
    def fact_rule(self, meta, children):
        return _Located(Rule(tuple(children[0])), _span(meta, self.source))

    @v_args(meta=True)
    def constraint(self, meta, children):
        return _Located(Rule((), tuple(children[0])), _span(meta, self.source))

    def head(self, children):
        return [c for c in children if isinstance(c, Atom)]

    def body(self, children):
        return list(children)

    def literal(self, children):
        positive = True
        if len(children) == 2:
            positive = False
        return BodyLiteral(children[-1], positive)

    @v_args(meta=True)
    def builtin(self, meta, children):
        lhs, op, rhs = children
        return BodyLiteral(Builtin(lhs, str(op), rhs))

    @v_args(meta=True)
    def conditional(self, meta, children):
        template, condition = children[1], children[2]
        if template.kind not in ('ordinary', 'builtin'):
            raise ParseError("conditional template must be an ordinary literal", _span(meta, self.source))
        return BodyLiteral(Conditional(template, condition))

    def atom(self, children):
        name = str(children[0])
        args = tuple(children[1]) if len(children) > 1 else ()
        return Atom(name, args)

    @v_args(meta=True)
    def external(self, meta, children):
        name = str(children[0])
        kind, inputs = children[1]
        outputs = children[2] if len(children) > 2 else []
        if name in ('query_b', 'query_c'):
            if kind != 'query':
                raise ParseError(f"&{name} needs a quoted subprogram path", _span(meta, self.source))
            path, predicates = inputs
            literals = []
            for positive, term in outputs:
                if not is_ground_term(term):
                    raise ParseError(f"query literal '{term}' is not ground", _span(meta, self.source))
                literals.append(BodyLiteral(atom_from_term(term), positive))
            mode = 'brave' if name == 'query_b' else 'cautious'
            return QueryAtom(mode, path, tuple(str(p) for p in predicates), tuple(literals))
        if kind == 'query':
            raise ParseError(f"&{name} does not take a subprogram path", _span(meta, self.source))
        if any(not positive for positive, _ in outputs):
            raise ParseError(f"&{name} outputs cannot be negated", _span(meta, self.source))
        return ExternalAtom(name, tuple(inputs), tuple(term for _, term in outputs))

    def query_inputs(self, children):
        path = str(children[0])[1:-1]
        predicates = children[1] if len(children) > 1 else []
        return ('query', (path, predicates))

    def plain_inputs(self, children):
        return ('plain', children[0] if children else [])

    def ext_outputs(self, children):
        return list(children)

    def ext_output(self, children):
        return (len(children) == 1, children[-1])

    def terms(self, children):
        return list(children)

    def variable(self, children):
        return Variable(str(children[0]))

    def constant(self, children):
        return Constant(str(children[0]))

    def function(self, children):
        return Function(str(children[0]), tuple(children[1]))


def _check_arities(program, spans):
    seen = {}
    for rule, span in zip(program.rules, spans):
        atoms = list(rule.head) + list(rule.positive_atoms) + list(rule.negative_atoms)
        for literal in rule.body:
            if literal.kind == 'conditional':
                atoms.append(literal.payload.condition)
                if literal.payload.template.kind == 'ordinary':
                    atoms.append(literal.payload.template.payload)
        for atom in atoms:
            known = seen.setdefault(atom.predicate, atom.arity)
            if known != atom.arity:
                raise ArityError(
                    f"predicate '{atom.predicate}' used with arity {atom.arity} and {known} in rule '{rule}'",
                    span,
                )


def _check_safety(program, spans):
    for rule, span in zip(program.rules, spans):
        unsafe = unsafe_variables(rule)
        if unsafe:
            names = ', '.join(sorted(v.name for v in unsafe))
            raise SafetyError(f"unsafe variables {names} in rule '{rule}'", span)


def parse_program(text, source='<string>'):
    """Parse program text; errors carry a SourceSpan and the expected tokens."""
    try:
        tree = _parser.parse(text)
    except lark.exceptions.UnexpectedToken as exc:
        raise ParseError(
            f"unexpected token '{exc.token}'",
            SourceSpan(source, max(exc.line, 1), max(exc.column, 1)),
            exc.expected,
        ) from exc
    except lark.exceptions.UnexpectedCharacters as exc:
        raise ParseError(
            f"unexpected character '{exc.char}'",
            SourceSpan(source, max(exc.line, 1), max(exc.column, 1)),
            exc.allowed or (),
        ) from exc
    except lark.exceptions.UnexpectedEOF as exc:
        raise ParseError("unexpected end of input", SourceSpan(source, 1, 1), exc.expected) from exc
    try:
        builder = ProgramBuilder(source)
        program = builder.transform(tree)
    except lark.exceptions.VisitError as exc:
        if isinstance(exc.orig_exc, ParseError):
            raise exc.orig_exc from exc
        raise
    _check_arities(program, builder.spans)
    _check_safety(program, builder.spans)
    logger.debug("parsed %d rules from %s", len(program.rules), source)
    return program


def parse_file(path):
    path = Path(path)
    return parse_program(path.read_text(encoding='utf-8'), str(path))


def parse_atoms(text, source='<facts>'):
    """Parse a fact list such as 'a. p(1).' or 'a, p(1)' into ground atoms."""
    text = text.strip()
    if not text:
        return set()
    if not text.endswith('.'):
        text = '. '.join(part for part in _split_top_level(text)) + '.'
    program = parse_program(text, source)
    found = set()
    for rule in program.rules:
        if not rule.is_fact or not rule.head[0].is_ground:
            raise ParseError(f"'{rule}' is not a ground fact", SourceSpan(source, 1, 1))
        found.add(rule.head[0])
    return found


def parse_term(text):
    program = parse_program(f"__t({text}).")
    return program.rules[0].head[0].args[0]


def _split_top_level(text):
    depth = 0
    current = []
    for char in text:
        if char == '(':
            depth += 1
        elif char == ')':
            depth -= 1
        if char == ',' and depth == 0:
            yield ''.join(current).strip()
            current = []
        else:
            current.append(char)
    if current:
        yield ''.join(current).strip()


def render_program(program):
    from .ast import render

    return render(program)
