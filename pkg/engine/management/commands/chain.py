from engine.evalchain import MODE_ALIASES, evaluate_chain, split_program
from engine.management.base import AspirCommand
from engine.metaenc import rewrite_queries
from engine.serializers import ChainResultSerializer, render_json


class Command(AspirCommand):
    help = 'Evaluates a program as a chain of units (see #split.)'

    def add_arguments(self, parser):
        self.add_program_arguments(parser)
        parser.add_argument('--mode', choices=sorted(MODE_ALIASES), default='split')
        parser.add_argument('--stats', action='store_true', help='print per-unit counters after the answer sets')

    def handle(self, *args, **options):
        program = self.load_program(options['file'])
        if program.has_queries:
            program = rewrite_queries(program)
        registry = self.load_registry(options)
        chain = split_program(program, registry)
        result = evaluate_chain(
            chain, self.load_facts(options['facts']), MODE_ALIASES[options['mode']], registry=registry,
        )

        if options['json']:
            self.stdout.write(render_json(ChainResultSerializer(result)))
        else:
            self.write_answer_sets(result.answer_sets)
            if options['stats']:
                for index, counters in enumerate(result.counters):
                    self.stdout.write(
                        f"unit {index}: groundings={counters.groundings} solves={counters.solves} "
                        f"conflicts={counters.conflicts} learned={counters.learned}"
                    )
                for index, rule in result.learned:
                    self.stdout.write(f"learned in unit {index}: {rule}")
        if not result.answer_sets:
            self.fail("no answer set")
