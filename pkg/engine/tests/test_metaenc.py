from django.test import SimpleTestCase

from engine.ast import Atom
from engine.cdnl import solve, solve_all
from engine.exceptions import DomainError, MetaEncodingError
from engine.metaenc import (
    MetaNamespace, build_m, check_inconsistency_meta, encode_ground, encode_nonground, enumerate_irs_tau,
    load_program_with_queries, meta_answer_sets, query_entails, rewrite_queries, tau,
)
from engine.refsem import answer_sets_bruteforce, irs_bruteforce

from .helpers import (
    answer_set, atoms, fixture, fixture_path, input_atoms, program, random_normal_program, seeded, trials,
)


def rendered(p):
    return [str(r) for r in p.rules]


class EncodingTests(SimpleTestCase):
    def test_ground_encoding(self):
        encoded = encode_ground(program("a :- b, not c. b."))
        self.assertEqual(
            rendered(encoded),
            ['head(r1,a).', 'bodyP(r1,b).', 'bodyN(r1,c).', 'head(r2,b).'],
        )

    def test_nonground_encoding(self):
        encoded = encode_nonground(fixture('choice_pair.lp'))
        self.assertIn('head(r1,d(a)).', rendered(encoded))
        self.assertIn('head(r2(X),q(X)) :- head(R_1,d(X)).', rendered(encoded))
        self.assertIn('bodyN(r2(X),p(X)) :- head(R_1,d(X)).', rendered(encoded))

    def test_only_normal_programs(self):
        with self.assertRaises(MetaEncodingError):
            encode_ground(program("a v b."))
        with self.assertRaises(MetaEncodingError):
            encode_nonground(fixture('self_support.lp'))

    def test_static_program_is_cached(self):
        self.assertIs(build_m(), build_m())


class MetaConsistencyTests(SimpleTestCase):
    def test_consistent_program_projects_its_answer_sets(self):
        consistent, projections = meta_answer_sets(fixture('choice_pair.lp'))
        self.assertTrue(consistent)
        self.assertEqual(projections, {answer_set('{d(a), q(a)}'), answer_set('{d(a), p(a)}')})

    def test_odd_loop_saturates(self):
        self.assertEqual(meta_answer_sets(fixture('odd_loop.lp')), (False, set()))
        self.assertTrue(check_inconsistency_meta(fixture('odd_loop.lp')))
        self.assertFalse(check_inconsistency_meta(fixture('even_loop.lp')))

    def test_constraints_are_normalized(self):
        consistent, projections = meta_answer_sets(program("a :- not b. b :- not a. :- a."))
        self.assertTrue(consistent)
        self.assertEqual(projections, {answer_set('{b}')})

    def test_agrees_with_reference_semantics(self):
        rng = seeded(3)
        for trial in range(trials(5, 50)):
            p = random_normal_program(rng, max_atoms=3, max_rules=4)
            with self.subTest(trial=trial, program=str(p)):
                expected = answer_sets_bruteforce(p)
                consistent, projections = meta_answer_sets(p)
                self.assertEqual(consistent, bool(expected))
                if consistent:
                    self.assertEqual(projections, {frozenset(a for a in s if not a.is_auxiliary) for s in expected})


class TauTests(SimpleTestCase):
    def test_reasons_of_a_fixture(self):
        p = fixture('ir_basic.lp')
        domain = atoms("a, b, c")
        self.assertEqual(enumerate_irs_tau(p, domain), irs_bruteforce(p, domain))

    def test_random_programs(self):
        rng = seeded(5)
        inputs = input_atoms(2)
        for trial in range(trials(3, 30)):
            p = random_normal_program(rng, max_atoms=3, max_rules=4, inputs=inputs)
            with self.subTest(trial=trial, program=str(p)):
                self.assertEqual(enumerate_irs_tau(p, inputs), irs_bruteforce(p, inputs))

    def test_domain_atoms_must_not_be_heads(self):
        with self.assertRaises(DomainError):
            tau(atoms("d"), fixture('ir_basic.lp'))


class QueryTests(SimpleTestCase):
    def test_direct_entailment(self):
        check = fixture('ham_check.lp')
        cycle = atoms("node(a), node(b), in(a,b), in(b,a)")
        self.assertFalse(query_entails(check, 'cautious', cycle, program(":- invalid.").rules[0].body))
        path = atoms("node(a), node(b), in(a,b)")
        self.assertTrue(query_entails(check, 'cautious', path, program(":- invalid.").rules[0].body))
        self.assertTrue(query_entails(check, 'brave', path, program(":- invalid.").rules[0].body))

    def test_subprograms_are_loaded_next_to_the_file(self):
        loaded = load_program_with_queries(fixture_path('ham.lp'))
        (query,) = loaded.query_decls
        self.assertEqual(query.subprogram, 'ham_sub.lp')
        self.assertEqual(rendered(query.program), rendered(fixture('ham_sub.lp')))

    def test_rewriting_removes_query_atoms(self):
        rewritten = rewrite_queries(load_program_with_queries(fixture_path('ham.lp')))
        self.assertFalse(rewritten.has_queries)
        self.assertIn('noHamiltonian :- __q1_noAS.', rendered(rewritten))
        self.assertTrue(any(str(r).startswith('__q1_head(rin_arc(X1,X2),arc(X1,X2))') for r in rewritten.rules))

    def test_hamiltonian_entailment(self):
        invalid = program(":- invalid.").rules[0].body
        sub = fixture('ham_sub.lp')
        two_way_path = atoms("node(a), node(b), node(c), arc(a,b), arc(b,a), arc(b,c), arc(c,b)")
        three_cycle = atoms("node(a), node(b), node(c), arc(a,b), arc(b,c), arc(c,a)")
        self.assertTrue(query_entails(sub, 'cautious', two_way_path, invalid))
        self.assertFalse(query_entails(sub, 'cautious', three_cycle, invalid))

    def test_no_hamiltonian_cycle_through_the_rewriting(self):
        for name, expected in (('ham.lp', True), ('ham_cycle.lp', False)):
            rewritten = rewrite_queries(load_program_with_queries(fixture_path(name)))
            outcome = solve(rewritten)
            with self.subTest(fixture=name):
                self.assertTrue(outcome.is_answer_set)
                self.assertEqual(Atom('noHamiltonian') in outcome.answer_set, expected)

    def test_missing_subprogram(self):
        with self.assertRaises(MetaEncodingError):
            rewrite_queries(program('x :- &query_c["missing.lp"; p](a).'))

    def test_rewritten_program_checks_every_guess(self):
        rewritten = rewrite_queries(load_program_with_queries(fixture_path('ham_inputs.lp')))
        found = solve_all(rewritten)
        self.assertEqual(len(found), 4)
        valid = [s for s in found if Atom('notHamiltonian') not in s]
        self.assertEqual(len(valid), 1)
        self.assertLessEqual(atoms("in(a,b), in(b,a)"), valid[0])

    def test_namespace(self):
        namespace = MetaNamespace(2)
        self.assertEqual(str(namespace.no_as), '__q2_noAS')
        renamed = namespace.apply(program("head(r1,a)."))
        self.assertEqual(rendered(renamed), ['__q2_head(r1,a).'])
