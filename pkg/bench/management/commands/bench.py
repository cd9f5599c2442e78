from pathlib import Path

from django.core.management.base import CommandError

from bench.generators import FAMILIES
from bench.serializers import BenchRowSerializer
from bench.suite import run_suite, write_csv
from engine.evalchain import MODE_ALIASES
from engine.management.base import EXIT_USAGE, AspirCommand
from engine.serializers import render_json


def _int_list(value):
    try:
        return [int(part) for part in value.split(',') if part.strip()]
    except ValueError:
        raise CommandError(f"expected a comma-separated list of integers, got '{value}'", returncode=EXIT_USAGE)


def _mode_list(value):
    modes = [part.strip() for part in value.split(',') if part.strip()]
    unknown = [m for m in modes if m not in MODE_ALIASES]
    if unknown:
        raise CommandError(f"unknown mode(s): {', '.join(unknown)}", returncode=EXIT_USAGE)
    return [MODE_ALIASES[m] for m in modes]


class Command(AspirCommand):
    help = 'Generates benchmark instances and evaluates them in every requested mode'

    def add_arguments(self, parser):
        parser.add_argument('family', choices=FAMILIES)
        parser.add_argument('--sizes', default='1,2,3,4,5', help='comma-separated instance sizes')
        parser.add_argument('--seeds', default='0', help='comma-separated seeds')
        parser.add_argument('--modes', default='monolithic,split,tuprop')
        parser.add_argument('--out', help='CSV file (default: standard output)')
        parser.add_argument('--jobs', type=int, default=1, help='dispatch instances as a celery group')
        parser.add_argument('--json', action='store_true', help='print JSON rows instead of CSV')

    def handle(self, *args, **options):
        sizes = _int_list(options['sizes'])
        if not sizes or min(sizes) < 1:
            self.fail("sizes must be positive", EXIT_USAGE)
        rows = run_suite(
            options['family'], sizes, _int_list(options['seeds']), _mode_list(options['modes']),
            jobs=max(1, options['jobs']),
        )

        if options['json']:
            self.stdout.write(render_json(BenchRowSerializer(rows, many=True)))
        elif options['out']:
            with Path(options['out']).open('w', encoding='utf-8', newline='') as handle:
                write_csv(rows, handle)
            self.stdout.write(self.style.SUCCESS(f"wrote {len(rows)} rows to {options['out']}"))
        else:
            write_csv(rows, self.stdout)
