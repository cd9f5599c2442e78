import random
from pathlib import Path

from django.conf import settings

from engine.ast import Atom, Program, Rule, neg, pos
from engine.parser import parse_atoms, parse_file, parse_program

FIXTURES = Path(__file__).resolve().parent.parent / 'fixtures'


def fixture_path(name):
    return FIXTURES / name


def fixture(name):
    return parse_file(fixture_path(name))


def program(text):
    return parse_program(text)


def atoms(text):
    return frozenset(parse_atoms(text))


def answer_set(text):
    """'{a, p(1)}' or 'a, p(1)' as a frozenset of atoms."""
    return atoms(text.strip().strip('{}'))


def trials(reduced, full):
    """Number of random trials; ASPIR_RANDOM_TRIALS=full runs the complete counts."""
    return full if settings.ASPIR_RANDOM_TRIALS == 'full' else reduced


def random_normal_program(rng, max_atoms=6, max_rules=8, constraints=True, inputs=(), prefix='a'):
    """
    A random ground normal program over atoms a0..a(n-1) (or another prefix).
    Input atoms occur in bodies only.
    """
    names = [Atom(f"{prefix}{i}") for i in range(rng.randint(1, max_atoms))]
    readable = names + list(inputs)
    rules = []
    for _ in range(rng.randint(1, max_rules)):
        body = []
        for atom in rng.sample(readable, rng.randint(0, min(3, len(readable)))):
            body.append(pos(atom) if rng.random() < 0.5 else neg(atom))
        if constraints and body and rng.random() < 0.15:
            rules.append(Rule((), tuple(body)))
        else:
            rules.append(Rule((rng.choice(names),), tuple(body)))
    return Program(tuple(rules))


def seeded(seed):
    return random.Random(seed)


def input_atoms(count):
    return tuple(Atom(f"i{k}") for k in range(count))
