from django.test import SimpleTestCase

from engine.ast import Atom, Constant, ExternalAtom
from engine.exceptions import ExternalArityError, UnknownExternal
from engine.externals import (
    DIFF, ID, NEG, ExternalRegistry, external_of, learn_io_nogoods, load_provider_external, load_table_external,
    replacement_atoms,
)
from engine.nogoods import F, T

from .helpers import atoms, fixture_path


def external(name, inputs, outputs=()):
    return ExternalAtom(name, tuple(Constant(i) for i in inputs), tuple(Constant(o) for o in outputs))


class BuiltinOracleTests(SimpleTestCase):
    def setUp(self):
        self.registry = ExternalRegistry.default()

    def test_id_and_neg(self):
        self.assertTrue(self.registry.evaluate(external('id', ['p']), atoms("p")))
        self.assertFalse(self.registry.evaluate(external('id', ['p']), atoms("q")))
        self.assertTrue(self.registry.evaluate(external('neg', ['p']), atoms("q")))
        self.assertFalse(self.registry.evaluate(external('neg', ['p']), atoms("p")))

    def test_diff(self):
        interpretation = atoms("dom(1), dom(2), in(2)")
        self.assertTrue(self.registry.evaluate(external('diff', ['dom', 'in'], ['1']), interpretation))
        self.assertFalse(self.registry.evaluate(external('diff', ['dom', 'in'], ['2']), interpretation))
        extensions = (atoms("dom(1), dom(2)"), atoms("in(2)"))
        self.assertEqual(self.registry.possible_outputs(external('diff', ['dom', 'in'], ['X']), extensions),
                         {(Constant('1'),)})

    def test_monotonicity_flags(self):
        self.assertEqual(ID.monotone, (True,))
        self.assertEqual(NEG.monotone, (False,))
        self.assertEqual(DIFF.monotone, (True, False))

    def test_unknown_external(self):
        with self.assertRaises(UnknownExternal):
            self.registry.evaluate(external('nope', ['p']), frozenset())

    def test_arity_mismatch(self):
        with self.assertRaises(ExternalArityError):
            self.registry.evaluate(external('id', ['p', 'q']), frozenset())
        with self.assertRaises(ExternalArityError):
            self.registry.evaluate(external('diff', ['dom', 'in']), frozenset())


class ReplacementAtomTests(SimpleTestCase):
    def test_names(self):
        e, ne = replacement_atoms(external('id', ['p']))
        self.assertEqual(str(e), '__e_id(in(p))')
        self.assertEqual(str(ne), '__ne_id(in(p))')
        self.assertTrue(e.is_auxiliary)

    def test_external_of_inverts_replacement(self):
        ext = external('diff', ['dom', 'in'], ['3'])
        self.assertEqual(external_of(replacement_atoms(ext)[0]), ext)

    def test_ordinary_atom_is_not_a_replacement(self):
        with self.assertRaises(UnknownExternal):
            external_of(Atom('p'))


class LearningTests(SimpleTestCase):
    def test_monotone_true_keeps_true_inputs(self):
        ext = external('id', ['p'])
        e, _ = replacement_atoms(ext)
        nogoods = learn_io_nogoods(ID, ext, atoms("p"), atoms("p"))
        self.assertEqual(nogoods, {frozenset({T(Atom('p')), F(e)})})

    def test_monotone_false_keeps_false_inputs(self):
        ext = external('id', ['p'])
        e, _ = replacement_atoms(ext)
        nogoods = learn_io_nogoods(ID, ext, frozenset(), atoms("p"))
        self.assertEqual(nogoods, {frozenset({F(Atom('p')), T(e)})})

    def test_nonmonotone_keeps_every_input(self):
        ext = external('neg', ['p'])
        e, _ = replacement_atoms(ext)
        nogoods = learn_io_nogoods(NEG, ext, atoms("p"), atoms("p"))
        self.assertEqual(nogoods, {frozenset({T(Atom('p')), T(e)})})

    def test_diff_only_mentions_relevant_inputs(self):
        ext = external('diff', ['dom', 'in'], ['1'])
        e, _ = replacement_atoms(ext)
        known = atoms("dom(1), dom(2), in(1), in(2)")
        nogoods = learn_io_nogoods(DIFF, ext, atoms("dom(1), dom(2)"), known)
        (nogood,) = nogoods
        self.assertEqual(nogood, frozenset({T(Atom('dom', (Constant('1'),))), F(Atom('in', (Constant('1'),))), F(e)}))


class TableExternalTests(SimpleTestCase):
    def test_table_lookup(self):
        decl = load_table_external({'p(1)': [['x']], '': []}, 'tab')
        registry = ExternalRegistry.default().with_decls(decl)
        self.assertTrue(registry.evaluate(external('tab', ['p'], ['x']), atoms("p(1)")))
        self.assertFalse(registry.evaluate(external('tab', ['p'], ['x']), frozenset()))
        self.assertEqual(decl.monotone, (False,))
        self.assertIn('tab', registry)

    def test_rows_must_share_arity(self):
        with self.assertRaises(ExternalArityError):
            load_table_external({'': [['x'], ['x', 'y']]}, 'bad')


class ProviderExternalTests(SimpleTestCase):
    def setUp(self):
        self.decl = load_provider_external(fixture_path('competences.json'), 'competent')

    def test_outputs(self):
        extensions = (atoms("in(joe)"),)
        self.assertEqual(self.decl.true_outputs(extensions), {(Constant('technical'),)})
        self.assertEqual(self.decl.true_outputs((atoms("in(jack)"),)), set())

    def test_relevance_restricts_learned_nogoods(self):
        ext = external('competent', ['in'], ['financial'])
        e, _ = replacement_atoms(ext)
        known = atoms("in(jack), in(joe), in(alyson)")
        nogoods = learn_io_nogoods(self.decl, ext, atoms("in(jack)"), known)
        self.assertEqual(nogoods, {frozenset({F(Atom('in', (Constant('alyson'),))), T(e)})})
