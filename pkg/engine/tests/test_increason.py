from django.test import SimpleTestCase

from engine.ast import InconsistencyReason, facts
from engine.exceptions import DomainError
from engine.increason import (
    NotLiftable, analyze_nonground, analyze_via, analyze_with_solver, is_primed, lifting_program, primed,
)
from engine.refsem import answer_sets_bruteforce, check_ir, irs_bruteforce

from .helpers import atoms, fixture, input_atoms, program, random_normal_program, seeded, trials


def reason(plus, minus):
    return InconsistencyReason(atoms(plus), atoms(minus))


class GroundAnalysisTests(SimpleTestCase):
    def setUp(self):
        self.program = fixture('ir_basic.lp')
        self.domain = atoms("a, b, c")

    def test_reason_from_level_zero_conflict(self):
        outcome = analyze_with_solver(self.program, atoms("a"), self.domain)
        self.assertFalse(outcome.is_answer_set)
        self.assertEqual(outcome.handler_result, reason("a", "c"))
        self.assertEqual(str(outcome.handler_result), 'IR: +{a} -{c}')

    def test_consistent_facts(self):
        outcome = analyze_with_solver(self.program, atoms("a, c"), self.domain)
        self.assertTrue(outcome.is_answer_set)

    def test_facts_must_lie_in_the_domain(self):
        with self.assertRaises(DomainError):
            analyze_with_solver(self.program, atoms("x"), self.domain)

    def test_domain_must_not_meet_heads(self):
        with self.assertRaises(DomainError):
            analyze_with_solver(self.program, (), atoms("d"))

    def test_random_reasons_are_sound(self):
        rng = seeded(11)
        inputs = input_atoms(3)
        domain = frozenset(inputs)
        for trial in range(trials(30, 300)):
            p = random_normal_program(rng, inputs=inputs)
            chosen = frozenset(a for a in inputs if rng.random() < 0.5)
            with self.subTest(trial=trial, program=str(p), facts=sorted(map(str, chosen))):
                outcome = analyze_with_solver(p, chosen, domain)
                consistent = bool(answer_sets_bruteforce(p.extend(facts(chosen))))
                self.assertEqual(outcome.is_answer_set, consistent)
                if consistent:
                    continue
                found = outcome.handler_result
                self.assertLessEqual(found.r_plus, chosen)
                self.assertFalse(found.r_minus & chosen)
                self.assertTrue(check_ir(p, domain, found))


class LiftingTests(SimpleTestCase):
    def test_primed_atoms(self):
        atom = next(iter(atoms("q(1)")))
        self.assertEqual(str(primed(atom)), 'prime(q(1))')
        self.assertTrue(is_primed(primed(atom)))
        self.assertFalse(is_primed(atom))

    def test_conflict_on_dropped_instance_is_not_liftable(self):
        outcome = analyze_nonground(fixture('lifting.lp'), (), atoms("a, p(1)"))
        self.assertFalse(outcome.is_answer_set)
        self.assertIsInstance(outcome.handler_result, NotLiftable)

    def test_undefined_mode_is_not_liftable_either(self):
        outcome = analyze_nonground(fixture('lifting.lp'), (), atoms("a, p(1)"), primed_mode='undefined')
        self.assertIsInstance(outcome.handler_result, NotLiftable)

    def test_consistent_instance(self):
        outcome = analyze_nonground(fixture('lifting.lp'), atoms("p(1)"), atoms("a, p(1)"))
        self.assertTrue(outcome.is_answer_set)

    def test_liftable_reason(self):
        p = program("q(X) :- p(X). :- q(1).")
        for mode in ('all', 'undefined'):
            with self.subTest(mode=mode):
                outcome = analyze_nonground(p, atoms("p(1)"), atoms("p(1)"), primed_mode=mode)
                self.assertEqual(outcome.handler_result, reason("p(1)", ""))

    def test_lifting_program_adds_primed_supports(self):
        ground, primes = lifting_program(fixture('lifting.lp'), (), atoms("a, p(1)"))
        self.assertEqual({str(a) for a in primes}, {'prime(q(1))'})
        self.assertIn('q(1) :- prime(q(1)).', [str(r) for r in ground.rules])

    def test_unknown_primed_mode(self):
        with self.assertRaises(ValueError):
            lifting_program(fixture('lifting.lp'), (), atoms("a"), primed_mode='some')


class AnalyzeViaTests(SimpleTestCase):
    def setUp(self):
        self.program = fixture('ir_basic.lp')
        self.domain = atoms("a, b, c")

    def test_all_reasons_agree(self):
        expected = irs_bruteforce(self.program, self.domain)
        self.assertEqual(set(analyze_via('bruteforce', self.program, self.domain)), expected)
        self.assertEqual(set(analyze_via('tau', self.program, self.domain)), expected)

    def test_solver_reason_is_one_of_them(self):
        found = analyze_via('cdnl', self.program, self.domain, facts=atoms("a, b"))
        self.assertEqual(len(found), 1)
        self.assertIn(found[0], irs_bruteforce(self.program, self.domain))

    def test_minimized_reason(self):
        found = analyze_via('cdnl', self.program, self.domain, facts=atoms("a, b"), minimize=True)
        self.assertEqual(found, [reason("a", "c")])

    def test_consistent_facts_give_nothing(self):
        self.assertEqual(analyze_via('cdnl', self.program, self.domain, facts=atoms("c")), [])

    def test_unknown_method(self):
        with self.assertRaises(ValueError):
            analyze_via('guess', self.program, self.domain)
