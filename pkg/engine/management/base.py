from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from engine.ast import project, render_interpretation
from engine.exceptions import AspirError, BoundExceeded
from engine.externals import ExternalRegistry, load_provider_external, load_table_external
from engine.metaenc import load_program_with_queries
from engine.parser import parse_atoms

EXIT_INCONSISTENT = 1
EXIT_USAGE = 2
EXIT_BOUND = 3


def _named_path(value):
    name, sep, path = value.partition('=')
    if not sep or not name or not path:
        raise CommandError(f"expected NAME=PATH, got '{value}'", returncode=EXIT_USAGE)
    return name, path


class AspirCommand(BaseCommand):
    """Shared options and error handling of the program commands."""

    def add_program_arguments(self, parser):
        parser.add_argument('file', help='program file')
        parser.add_argument('--facts', help='facts file, or an inline list such as "a, p(1)"')
        parser.add_argument(
            '--table', action='append', default=[], metavar='NAME=PATH',
            help='nonmonotone external &NAME given by a JSON table',
        )
        parser.add_argument(
            '--providers', action='append', default=[], metavar='NAME=PATH',
            help='monotone external &NAME given by a JSON provider table',
        )
        parser.add_argument('--json', action='store_true', help='print JSON instead of text')

    def execute(self, *args, **options):
        try:
            return super().execute(*args, **options)
        except BoundExceeded as exc:
            raise CommandError(str(exc), returncode=EXIT_BOUND) from exc
        except AspirError as exc:
            raise CommandError(str(exc), returncode=EXIT_USAGE) from exc
        except OSError as exc:
            raise CommandError(str(exc), returncode=EXIT_USAGE) from exc

    def load_program(self, path):
        return load_program_with_queries(path)

    def load_facts(self, value):
        if not value:
            return frozenset()
        path = Path(value)
        if path.is_file():
            return frozenset(parse_atoms(path.read_text(encoding='utf-8'), str(path)))
        return frozenset(parse_atoms(value))

    def load_registry(self, options):
        registry = ExternalRegistry.default()
        for value in options.get('table') or ():
            name, path = _named_path(value)
            registry = registry.with_decls(load_table_external(path, name))
        for value in options.get('providers') or ():
            name, path = _named_path(value)
            registry = registry.with_decls(load_provider_external(path, name))
        return registry

    def write_answer_sets(self, answer_sets):
        for rendered in sorted(render_interpretation(project(a)) for a in answer_sets):
            self.stdout.write(rendered)

    def fail(self, message, returncode=EXIT_INCONSISTENT):
        raise CommandError(message, returncode=returncode)
