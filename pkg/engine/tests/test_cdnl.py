from django.test import SimpleTestCase

from engine.ast import Atom, Rule, facts, neg, pos
from engine.cdnl import Search, Solver, analyze_conflict, has_answer_set, solve, solve_all
from engine.exceptions import NotGround
from engine.grounder import ground_program
from engine.nogoods import F, SymbolTable, T
from engine.refsem import answer_sets_bruteforce

from .helpers import answer_set, atoms, fixture, program, random_normal_program, seeded, trials


class ConflictAnalysisTests(SimpleTestCase):
    def setUp(self):
        self.a, self.b, self.c, self.d, self.e = (Atom(n) for n in 'abcde')
        symbols = SymbolTable()
        for atom in (self.a, self.b, self.c, self.d, self.e):
            symbols.intern(atom)
        self.search = Search(symbols)
        a, b, c, d, e = self.a, self.b, self.c, self.d, self.e
        self.search.add_all([
            frozenset({T(a), T(b)}),
            frozenset({T(a), F(b), F(c)}),
            frozenset({T(c), T(d), F(e)}),
            frozenset({T(d), T(e)}),
        ])

    def test_implication_chain(self):
        self.search.decide(T(self.a))
        self.assertIsNone(self.search.propagate())
        self.assertTrue(self.search.trail.is_false(self.search.symbols.index(self.b)))
        self.assertTrue(self.search.trail.is_true(self.search.symbols.index(self.c)))
        self.search.decide(T(self.d))
        conflict = self.search.propagate()
        self.assertIsNotNone(conflict)
        # either nogood over d may be the one found violated
        self.assertIn(
            self.search.literals(conflict),
            {frozenset({T(self.d), T(self.e)}), frozenset({T(self.c), T(self.d), F(self.e)})},
        )
        learned, level = analyze_conflict(conflict, self.search)
        self.assertEqual(learned, frozenset({T(self.c), T(self.d)}))
        self.assertEqual(level, 1)

    def test_learned_nogood_asserts_after_backjump(self):
        self.search.decide(T(self.a))
        self.search.propagate()
        self.search.decide(T(self.d))
        conflict = self.search.propagate()
        self.assertIsNone(self.search.resolve_conflict(conflict))
        self.assertEqual(self.search.trail.decision_level, 1)
        self.assertTrue(self.search.trail.is_false(self.search.symbols.index(self.d)))
        self.assertEqual(self.search.stats.learned, 1)


class BatchTests(SimpleTestCase):
    def setUp(self):
        self.a, self.b, self.c = (Atom(n) for n in 'abc')
        symbols = SymbolTable()
        for atom in (self.a, self.b, self.c):
            symbols.intern(atom)
        self.search = Search(symbols)

    def is_false(self, atom):
        return self.search.trail.is_false(self.search.symbols.index(atom))

    def test_unit_below_a_violated_nogood_keeps_both(self):
        search = self.search
        search.decide(T(self.a))
        search.decide(T(self.b))
        self.assertIsNone(search.add_all([
            frozenset({T(self.a), T(self.b)}),
            frozenset({T(self.a), F(self.c)}),
        ]))
        self.assertEqual(search.trail.decision_level, 1)
        self.assertTrue(self.is_false(self.b))
        self.assertFalse(self.is_false(self.c))
        self.assertTrue(search.trail.is_assigned(search.symbols.index(self.c)))

    def test_violated_nogood_is_reported_at_its_level(self):
        search = self.search
        search.decide(T(self.a))
        search.decide(T(self.b))
        search.decide(T(self.c))
        conflict = search.add_all([frozenset({T(self.a), T(self.b)})])
        self.assertEqual(search.literals(conflict), frozenset({T(self.a), T(self.b)}))
        self.assertEqual(search.trail.decision_level, 2)

    def test_unit_at_level_zero(self):
        search = self.search
        search.decide(T(self.a))
        self.assertIsNone(search.add_all([frozenset({T(self.c)}), frozenset({T(self.a), T(self.b)})]))
        self.assertEqual(search.trail.decision_level, 0)
        self.assertTrue(self.is_false(self.c))
        search.decide(T(self.a))
        self.assertIsNone(search.propagate())
        self.assertTrue(self.is_false(self.b))


class SolverTests(SimpleTestCase):
    def test_even_loop(self):
        self.assertEqual(solve_all(fixture('even_loop.lp')), {answer_set('{a}'), answer_set('{b}')})

    def test_odd_loop(self):
        self.assertFalse(has_answer_set(fixture('odd_loop.lp')))

    def test_external_self_support_is_not_minimal(self):
        self.assertEqual(solve_all(fixture('self_support.lp')), {frozenset()})

    def test_negated_external_loop_is_inconsistent(self):
        self.assertFalse(has_answer_set(program("p :- &neg[p]().")))

    def test_non_ground_program_is_grounded(self):
        self.assertEqual(
            solve_all(fixture('choice_pair.lp')),
            {answer_set('{d(a), q(a)}'), answer_set('{d(a), p(a)}')},
        )

    def test_disjunction_needs_minimality(self):
        self.assertEqual(solve_all(program("a v b.")), {answer_set('{a}'), answer_set('{b}')})
        self.assertEqual(solve_all(program("a v b. a :- b. b :- a.")), {answer_set('{a, b}')})

    def test_saturation_matches_plain_coloring(self):
        graph = facts(atoms("node(a), node(b), edge(a,b)"))
        saturated = solve_all(fixture('non3col.lp').extend(graph))
        plain = solve_all(fixture('three_col.lp').extend(graph))
        self.assertEqual(len(saturated), 6)
        self.assertEqual(saturated, plain)

    def test_value_invention(self):
        self.assertEqual(len(solve_all(fixture('setguess.lp'))), 2)

    def test_several_external_atoms_in_one_program(self):
        p = program("a :- not b. b :- not a. c :- &id[a](). d :- &neg[b]().")
        self.assertEqual(solve_all(p), {atoms("a, c, d"), atoms("b")})
        self.assertEqual(solve_all(p, theory_propagation=False), {atoms("a, c, d"), atoms("b")})

    def test_unfounded_candidates_are_cut_by_loop_nogoods(self):
        p = program("a :- b. b :- a. c :- not d. d :- not c. a :- c.")
        solver = Solver(ground_program(p))
        self.assertEqual({o.answer_set for o in solver.answer_sets()}, {atoms("a, b, c"), atoms("d")})

    def test_facts_argument(self):
        self.assertEqual(solve_all(program("b :- a."), facts=atoms("a")), {answer_set('{a, b}')})

    def test_solver_needs_ground_program(self):
        with self.assertRaises(NotGround):
            Solver(program("p(X) :- q(X)."))

    def test_handler_result_on_inconsistency(self):
        outcome = solve(program(":- not a."), handler=lambda search, conflict: 'inconsistent')
        self.assertFalse(outcome.is_answer_set)
        self.assertEqual(outcome.handler_result, 'inconsistent')

    def test_options_do_not_change_answer_sets(self):
        p = fixture('setguess.lp')
        expected = solve_all(p)
        for options in ({'theory_propagation': False}, {'restarts': True, 'deletion': True}):
            with self.subTest(**options):
                self.assertEqual(solve_all(p, **options), expected)


class RandomProgramTests(SimpleTestCase):
    def test_agrees_with_reference_semantics(self):
        rng = seeded(7)
        for trial in range(trials(40, 400)):
            p = random_normal_program(rng)
            with self.subTest(trial=trial, program=str(p)):
                self.assertEqual(solve_all(p), answer_sets_bruteforce(p))


class AddConstraintTests(SimpleTestCase):
    def test_constraint_prunes_answer_sets(self):
        solver = Solver(fixture('even_loop.lp'))
        self.assertTrue(solver.add_constraint(Rule((), (pos(Atom('a')),))))
        self.assertEqual({o.answer_set for o in solver.answer_sets()}, {answer_set('{b}')})

    def test_constraint_during_enumeration(self):
        solver = Solver(fixture('even_loop.lp'))
        found = []
        for outcome in solver.answer_sets():
            found.append(outcome.answer_set)
            solver.add_constraint(Rule((), (neg(Atom('a')), neg(Atom('b')))))
            solver.add_constraint(Rule((), (pos(Atom('a')),)))
            solver.add_constraint(Rule((), (pos(Atom('b')),)))
        self.assertEqual(len(found), 1)

    def test_unknown_positive_atom_cannot_fire(self):
        solver = Solver(fixture('even_loop.lp'))
        self.assertFalse(solver.add_constraint(Rule((), (pos(Atom('z')),))))
        self.assertEqual(len(list(solver.answer_sets())), 2)

    def test_domain_atoms_are_variables(self):
        solver = Solver(ground_program(program("b :- a.")), domain=atoms("x"))
        self.assertIn(Atom('x'), solver.symbols)
        self.assertEqual({o.answer_set for o in solver.answer_sets()}, {frozenset()})
