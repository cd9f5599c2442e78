from engine.increason import METHODS, PRIMED_MODES, analyze_via
from engine.management.base import EXIT_USAGE, AspirCommand
from engine.metaenc import tau
from engine.parser import parse_atoms, render_program
from engine.serializers import ExplainResultSerializer, render_json


class Command(AspirCommand):
    help = 'Prints inconsistency reasons of a program wrt. a domain of input atoms'

    def add_arguments(self, parser):
        self.add_program_arguments(parser)
        parser.add_argument('--domain', required=True, help='comma-separated input atoms')
        parser.add_argument('--via', choices=METHODS, default='cdnl')
        parser.add_argument('--minimize', action='store_true', help='shrink the reason to a subset-minimal one')
        parser.add_argument('--primed', choices=PRIMED_MODES, default='all', help='lifting of non-ground programs')
        parser.add_argument('--emit-tau', action='store_true', help='print the reason-enumerating meta-program')

    def handle(self, *args, **options):
        program = self.load_program(options['file'])
        if program.has_queries:
            self.fail("explain does not take query atoms", EXIT_USAGE)
        domain = frozenset(parse_atoms(options['domain'], '<domain>'))
        if options['emit_tau']:
            self.stdout.write(render_program(tau(domain, program)))
            return
        facts = self.load_facts(options['facts'])
        reasons = analyze_via(
            options['via'], program, domain, facts,
            registry=self.load_registry(options),
            minimize=options['minimize'],
            primed_mode=options['primed'],
        )

        if options['json']:
            data = {
                'method': options['via'],
                'domain': domain,
                'consistent': not reasons,
                'reasons': reasons,
            }
            self.stdout.write(render_json(ExplainResultSerializer(data)))
        else:
            for reason in reasons:
                self.stdout.write(str(reason))
        if not reasons:
            self.fail("no inconsistency reason found")
