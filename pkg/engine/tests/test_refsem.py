from django.test import SimpleTestCase

from engine.ast import InconsistencyReason, facts
from engine.exceptions import BoundExceeded, DomainError
from engine.limits import get_limits
from engine.refsem import (
    answer_sets_bruteforce, check_ir, check_ir_sufficient, check_ir_via_ufs, gl_reduct, has_answer_set, has_ir,
    irs_bruteforce, is_answer_set, is_ir_bruteforce, is_minimal_ir, is_unfounded_set, minimize_ir, tp_lfp,
)

from .helpers import answer_set, atoms, fixture, program


def reason(plus, minus):
    return InconsistencyReason(atoms(plus), atoms(minus))


class AnswerSetTests(SimpleTestCase):
    def test_external_self_support_gives_empty_answer_set(self):
        self.assertEqual(answer_sets_bruteforce(fixture('self_support.lp')), {frozenset()})

    def test_even_loop(self):
        self.assertEqual(
            answer_sets_bruteforce(fixture('even_loop.lp')),
            {answer_set('{a}'), answer_set('{b}')},
        )

    def test_odd_loop_is_inconsistent(self):
        self.assertFalse(has_answer_set(fixture('odd_loop.lp')))

    def test_non3col_saturates_on_a_self_loop(self):
        graph = fixture('non3col.lp').extend(facts(atoms("node(a), edge(a,a)")))
        self.assertEqual(
            answer_sets_bruteforce(graph),
            {answer_set('{node(a), edge(a,a), r(a), g(a), b(a), sat}')},
        )

    def test_is_answer_set(self):
        even = fixture('even_loop.lp')
        self.assertTrue(is_answer_set(even, atoms("a")))
        self.assertFalse(is_answer_set(even, atoms("a, b")))

    def test_gl_reduct_and_least_model(self):
        reduct = gl_reduct(fixture('even_loop.lp'), atoms("a"))
        self.assertEqual([str(r) for r in reduct.rules], ['a.'])
        self.assertEqual(tp_lfp(reduct), atoms("a"))


class InconsistencyReasonTests(SimpleTestCase):
    def setUp(self):
        self.program = fixture('ir_basic.lp')
        self.domain = atoms("a, b, c")

    def test_all_reasons(self):
        self.assertEqual(
            irs_bruteforce(self.program, self.domain),
            {reason("a", "c"), reason("a, b", "c"), reason("a", "b, c")},
        )

    def test_membership_checks_agree(self):
        candidates = [reason("a", "c"), reason("a", ""), reason("", "c"), reason("a, b", "c"), reason("", "")]
        for candidate in candidates:
            with self.subTest(reason=str(candidate)):
                expected = is_ir_bruteforce(self.program, self.domain, candidate)
                self.assertEqual(check_ir(self.program, self.domain, candidate), expected)
                self.assertEqual(check_ir_via_ufs(self.program, self.domain, candidate), expected)

    def test_sufficient_check(self):
        self.assertTrue(check_ir_sufficient(self.program, self.domain, reason("a", "c")))
        self.assertFalse(check_ir_sufficient(self.program, self.domain, reason("a", "")))

    def test_minimize(self):
        shrunk = minimize_ir(self.program, self.domain, reason("a, b", "c"))
        self.assertEqual(shrunk, reason("a", "c"))
        self.assertTrue(is_minimal_ir(self.program, self.domain, shrunk))
        self.assertFalse(is_minimal_ir(self.program, self.domain, reason("a", "b, c")))

    def test_fact_program_has_no_reason(self):
        self.assertFalse(check_ir(program("a."), atoms("x"), reason("", "")))
        self.assertFalse(has_ir(fixture('even_loop.lp'), atoms("x")))
        self.assertTrue(has_ir(self.program, self.domain))

    def test_domain_atoms_must_not_be_defined(self):
        with self.assertRaises(DomainError):
            irs_bruteforce(self.program, atoms("d"))

    def test_domain_bound(self):
        limits = get_limits().override(max_ir_domain=2)
        with self.assertRaises(BoundExceeded):
            irs_bruteforce(self.program, self.domain, limits=limits)


class UnfoundedSetTests(SimpleTestCase):
    def test_self_support_is_unfounded(self):
        self.assertTrue(is_unfounded_set(atoms("a"), program("a :- a."), atoms("a")))

    def test_fact_is_not_unfounded(self):
        self.assertFalse(is_unfounded_set(atoms("a"), program("a."), atoms("a")))
