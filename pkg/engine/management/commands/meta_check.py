from engine.ast import facts as fact_rules
from engine.management.base import AspirCommand
from engine.metaenc import meta_answer_sets
from engine.serializers import SolveResultSerializer, render_json


class Command(AspirCommand):
    help = 'Decides consistency of a normal program through the saturation meta-program'

    def add_arguments(self, parser):
        self.add_program_arguments(parser)
        parser.add_argument(
            '--nonground', action='store_true',
            help='use the non-ground encoding even for a ground program',
        )

    def handle(self, *args, **options):
        program = self.load_program(options['file'])
        facts = self.load_facts(options['facts'])
        if facts:
            program = program.extend(fact_rules(facts))
        ground = False if options['nonground'] else None
        consistent, projections = meta_answer_sets(program, ground)

        if options['json']:
            data = {'consistent': consistent, 'answer_sets': projections, 'stats': None}
            self.stdout.write(render_json(SolveResultSerializer(data)))
        elif consistent:
            self.stdout.write(self.style.SUCCESS('CONSISTENT'))
            self.write_answer_sets(projections)
        else:
            self.stdout.write(self.style.ERROR('INCONSISTENT'))
        if not consistent:
            self.fail("the program is inconsistent")
