from engine.cdnl import solve_all
from engine.management.base import AspirCommand
from engine.metaenc import rewrite_queries
from engine.parser import render_program
from engine.serializers import SolveResultSerializer, render_json


class Command(AspirCommand):
    help = 'Answers the brave and cautious query atoms of a program through the meta-program rewriting'

    def add_arguments(self, parser):
        self.add_program_arguments(parser)
        parser.add_argument('--rewrite', action='store_true', help='print the rewritten program and stop')

    def handle(self, *args, **options):
        program = self.load_program(options['file'])
        if not program.has_queries:
            self.stdout.write(self.style.WARNING("the program has no query atoms"))
        rewritten = rewrite_queries(program)
        if options['rewrite']:
            self.stdout.write(render_program(rewritten))
            return
        facts = self.load_facts(options['facts'])
        found = solve_all(rewritten, facts, registry=self.load_registry(options))

        if options['json']:
            data = {'consistent': bool(found), 'answer_sets': found, 'stats': None}
            self.stdout.write(render_json(SolveResultSerializer(data)))
        else:
            self.write_answer_sets(found)
        if not found:
            self.fail("no answer set")
