from engine.ast import facts as fact_rules, project
from engine.cdnl import Solver
from engine.grounder import ground_program
from engine.management.base import AspirCommand
from engine.metaenc import rewrite_queries
from engine.refsem import answer_sets_bruteforce
from engine.serializers import SolveResultSerializer, render_json


class Command(AspirCommand):
    help = 'Prints the answer sets of a program, one per line'

    def add_arguments(self, parser):
        self.add_program_arguments(parser)
        parser.add_argument(
            '--mode', choices=('cdnl', 'oracle'), default='cdnl',
            help='conflict-driven solver or the brute-force reference',
        )

    def handle(self, *args, **options):
        program = rewrite_queries(self.load_program(options['file']))
        facts = self.load_facts(options['facts'])
        registry = self.load_registry(options)
        stats = None
        if options['mode'] == 'oracle':
            found = {project(a) for a in answer_sets_bruteforce(program.extend(fact_rules(facts)), registry)}
        else:
            ground = ground_program(program, facts, registry=registry)
            solver = Solver(ground, registry=registry)
            found = {outcome.answer_set for outcome in solver.answer_sets()}
            stats = solver.stats

        if options['json']:
            data = {'consistent': bool(found), 'answer_sets': found, 'stats': stats}
            self.stdout.write(render_json(SolveResultSerializer(data)))
        else:
            self.write_answer_sets(found)
        if not found:
            self.fail("no answer set")
