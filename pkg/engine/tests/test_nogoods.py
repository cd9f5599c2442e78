from django.test import SimpleTestCase

from engine.exceptions import NotGround
from engine.nogoods import (
    Body, F, SymbolTable, T, body_nogoods, body_of, clark_completion, render_nogood, shift,
    singleton_loop_nogoods, unfounded_set_nogood,
)

from .helpers import atoms, program


def atom(text):
    return next(iter(atoms(text)))


class CompletionTests(SimpleTestCase):
    def test_body_nogoods(self):
        rule = program("a :- b, not c.").rules[0]
        beta = body_of(rule)
        b, c = atom("b"), atom("c")
        self.assertEqual(
            body_nogoods(beta),
            {
                frozenset({T(beta), F(b)}),
                frozenset({T(beta), T(c)}),
                frozenset({F(beta), T(b), F(c)}),
            },
        )

    def test_fact_and_support(self):
        completion = clark_completion(program("a. b :- a."))
        beta = body_of(program("b :- a.").rules[0])
        self.assertIn(frozenset({F(atom("a"))}), completion)
        self.assertIn(frozenset({F(atom("b")), T(beta)}), completion)
        self.assertIn(frozenset({T(atom("b")), F(beta)}), completion)

    def test_constraint(self):
        completion = clark_completion(program(":- a."))
        beta = body_of(program(":- a.").rules[0])
        self.assertIn(frozenset({T(beta)}), completion)

    def test_atom_without_rules_is_false(self):
        nogoods = singleton_loop_nogoods(program("b :- a."))
        self.assertIn(frozenset({T(atom("a"))}), nogoods)

    def test_disjunction_is_shifted(self):
        shifted = shift(program("a v b :- c."))
        self.assertEqual(sorted(str(r) for r in shifted.rules), ['a :- c, not b.', 'b :- c, not a.'])
        completion = clark_completion(program("a v b :- c."))
        beta = body_of(program("x :- c.").rules[0])
        self.assertIn(frozenset({F(atom("a")), F(atom("b")), T(beta)}), completion)

    def test_non_ground_program_is_rejected(self):
        with self.assertRaises(NotGround):
            clark_completion(program("p(X) :- q(X)."))


class UnfoundedSetTests(SimpleTestCase):
    def test_positive_loop(self):
        p = program("a :- b. b :- a. a :- c. c :- not d. d :- not c.")
        nogood = unfounded_set_nogood(p, atoms("a, b, d"), atoms("a, b"))
        self.assertEqual(nogood, frozenset({T(atom("a")), F(atom("c"))}))

    def test_disjunctive_support_through_another_head(self):
        nogood = unfounded_set_nogood(program("a v b. c :- b."), atoms("a, b, c"), atoms("b, c"))
        self.assertEqual(nogood, frozenset({T(atom("b")), T(atom("a"))}))

    def test_supported_set_is_rejected(self):
        with self.assertRaises(ValueError):
            unfounded_set_nogood(program("a :- not b."), atoms("a"), atoms("a"))


class SymbolTableTests(SimpleTestCase):
    def test_encode_decode(self):
        symbols = SymbolTable()
        a = atom("a")
        code = symbols.encode(F(a))
        self.assertEqual(code, -1)
        self.assertEqual(symbols.decode(code), F(a))
        self.assertEqual(symbols.intern(a), 1)
        self.assertIn(a, symbols)
        self.assertEqual(symbols.atoms(), [a])

    def test_bodies_are_not_atoms(self):
        symbols = SymbolTable()
        symbols.intern(Body(frozenset()))
        symbols.intern(atom("a"))
        self.assertEqual(len(symbols), 2)
        self.assertEqual(symbols.atoms(), [atom("a")])

    def test_render(self):
        a, b = atom("a"), atom("b")
        self.assertEqual(render_nogood({F(b), T(a)}), '{T a, F b}')
