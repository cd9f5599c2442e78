from dataclasses import dataclass, fields, replace

from django.conf import settings
from django.core.exceptions import ImproperlyConfigured

from .exceptions import BoundExceeded


@dataclass(frozen=True)
class Limits:
    max_atoms: int = 20
    max_ir_domain: int = 12
    max_classical_atoms: int = 16
    max_ground_rules: int = 200000
    max_input_extensions: int = 4096
    max_minimality_conflicts: int = 200000
    max_term_depth: int = 3
    max_answer_sets: int = 100000
    bench_timeout_s: int = 60

    def override(self, **changes):
        return replace(self, **changes)

    def check(self, name, value):
        """Raise BoundExceeded when value passes the named bound."""
        if value > getattr(self, name):
            raise BoundExceeded(name, value)


def parse_limits(raw):
    """Overrides from a comma separated key=value list such as "max_atoms=18,max_ir_domain=8"."""
    known = {f.name for f in fields(Limits)}
    overrides = {}
    for item in (raw or '').split(','):
        item = item.strip()
        if not item:
            continue
        key, sep, value = item.partition('=')
        key = key.strip()
        if not sep or key not in known:
            raise ImproperlyConfigured(f"ASPIR_LIMITS: unknown entry '{item}'")
        try:
            overrides[key] = int(value)
        except ValueError as exc:
            raise ImproperlyConfigured(f"ASPIR_LIMITS: '{key}' expects an integer, got '{value}'") from exc
    return overrides


def get_limits():
    configured = getattr(settings, 'ASPIR_LIMITS', {})
    known = {f.name for f in fields(Limits)}
    return Limits(**{key: value for key, value in configured.items() if key in known})
