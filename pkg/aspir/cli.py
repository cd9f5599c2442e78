"""
Entry point: ``aspir SUBCOMMAND ...`` runs the management command of the
same name (dashes become underscores) and returns its exit code.
"""
import os
import sys

SUBCOMMANDS = ('solve', 'meta-check', 'query', 'explain', 'chain', 'bench')
USAGE = f"usage: aspir {{{','.join(SUBCOMMANDS)}}} FILE [options]"


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] not in SUBCOMMANDS:
        sys.stderr.write(USAGE + '\n')
        return 2
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'aspir.settings')
    import django
    from django.core.management import get_commands, load_command_class

    django.setup()
    name = argv[0].replace('-', '_')
    command = load_command_class(get_commands()[name], name)
    try:
        command.run_from_argv(['aspir', name, *argv[1:]])
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    return 0


if __name__ == '__main__':
    sys.exit(main())
