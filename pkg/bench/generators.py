"""
Deterministic instances of the three benchmark families.

Every instance is drawn from a SplitMix64 stream keyed by (family, n, seed):

    state = 0
    for each byte b of the family name:  state = mix64(state + b)
    state = mix64(state ^ n);  state = mix64(state ^ seed)
    next() = mix64(state += 0x9E3779B97F4A7C15)

with the usual SplitMix64 finalizer as ``mix64`` (all arithmetic mod 2^64).
"""

import logging
from dataclasses import dataclass
from itertools import combinations

from engine.ast import Atom, Constant
from engine.externals import ExternalDecl, ExternalRegistry, load_table_external, table_key
from engine.limits import get_limits
from engine.parser import parse_program

logger = logging.getLogger(__name__)

FAMILIES = ('config', 'diagnosis', 'setguess')

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def mix64(z):
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class SplitMix:
    def __init__(self, state):
        self.state = state & MASK64

    def next_u64(self):
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return mix64(self.state)

    def below(self, bound):
        return self.next_u64() % bound

    def chance(self, p):
        """True with probability p, decided on the top 53 bits."""
        return (self.next_u64() >> 11) < int(p * (1 << 53))

    def binomial(self, trials, p=0.5):
        return sum(1 for _ in range(trials) if self.chance(p))


def stream(family, n, seed):
    state = 0
    for byte in family.encode('ascii'):
        state = mix64((state + byte) & MASK64)
    state = mix64(state ^ (n & MASK64))
    state = mix64(state ^ (seed & MASK64))
    return SplitMix(state)


def property_count(n):
    return n // 5 + 1


def _selections(items):
    for size in range(len(items) + 1):
        yield from combinations(items, size)


def _unique(items):
    return list(dict.fromkeys(items))


def gen_config_instance(n, seed):
    """
    A configuration instance (D, P, m, C): elements 1..n are guessed in or
    out, the table external &m maps each selection to its properties, and
    every constraint forbids one combination of present and absent
    properties. Returns the program and {'m': table}.
    """
    if n < 1:
        raise ValueError("instances need n >= 1")
    get_limits().check('max_input_extensions', 1 << n)
    rng = stream('config', n, seed)
    elements = [Constant(str(i)) for i in range(1, n + 1)]
    properties = [f"p{j}" for j in range(1, property_count(n) + 1)]

    table = {}
    for chosen in _selections(elements):
        key = table_key((frozenset(Atom('in', (e,)) for e in chosen),))
        table[key] = [p for p in properties if rng.chance(0.5)]

    constraints = []
    for _ in range(rng.binomial(2 * n)):
        plus = [p for p in properties if rng.chance(1 / 3)]
        if not plus:
            plus = [properties[rng.below(len(properties))]]
        minus = [p for p in properties if p not in plus and rng.chance(1 / 3)]
        body = [f"prop({p})" for p in plus] + [f"not prop({p})" for p in minus]
        constraints.append(f":- {', '.join(body)}.")

    lines = [f"elem({e})." for e in elements]
    lines += ["in(X) v out(X) :- elem(X).", "#split.", "prop(P) :- &m[in](P)."]
    lines += _unique(constraints)
    program = parse_program('\n'.join(lines), f"<config n={n} seed={seed}>")
    logger.debug("config instance n=%d seed=%d: %d constraints", n, seed, len(program.rules) - n - 2)
    return program, {'m': table}


def necessity_external(table, name='necessary'):
    """
    &name[selh, selo, definite](): true iff every hypothesis selection whose
    explained observations cover the definite and the selected potential
    observations contains all selected hypotheses. ``table`` maps the
    comma-joined hypotheses of each selection to the observations it explains.
    """
    explained = {
        frozenset(key.split(',')) if key else frozenset(): frozenset(rows)
        for key, rows in table.items()
    }

    def evaluator(extensions, output):
        chosen = {str(a.args[0]) for a in extensions[0]}
        required = {str(a.args[0]) for a in extensions[1]} | {str(a.args[0]) for a in extensions[2]}
        for hypotheses, observations in explained.items():
            if required <= observations and not chosen <= hypotheses:
                return False
        return True

    return ExternalDecl(name, 3, 0, (False, False, False), evaluator)


def _split_observations(rng, n):
    observations = [f"o{i}" for i in range(1, n + 1)]
    definite = [o for o in observations if rng.chance(0.2)]
    potential = [o for o in observations if o not in definite]
    return observations, definite, potential


def observation_split(n, seed):
    """The definite and potential observations drawn for a diagnosis instance."""
    _, definite, potential = _split_observations(stream('diagnosis', n, seed), n)
    return definite, potential


def gen_diagnosis_instance(n, seed):
    """
    A diagnosis instance with n observations, each definite with probability
    0.2 and potential otherwise. Hypotheses are guessed together with the
    potential observations to confirm; constraints forbid pairs of
    hypotheses. Returns the program and {'necessary': table}.
    """
    if n < 1:
        raise ValueError("instances need n >= 1")
    rng = stream('diagnosis', n, seed)
    observations, definite, potential = _split_observations(rng, n)
    hypotheses = [f"h{j}" for j in range(1, property_count(n) + 1)]

    effects = {h: {o for o in observations if rng.chance(0.3)} for h in hypotheses}
    inhibits = {h: {o for o in observations if rng.chance(0.1)} for h in hypotheses}
    table = {}
    for chosen in _selections(hypotheses):
        caused = set().union(*(effects[h] for h in chosen))
        caused -= set().union(*(inhibits[h] for h in chosen))
        table[','.join(chosen)] = sorted(caused)

    constraints = []
    for _ in range(rng.binomial(len(hypotheses))):
        if len(hypotheses) == 1:
            pair = hypotheses
        else:
            first = rng.below(len(hypotheses))
            second = (first + 1 + rng.below(len(hypotheses) - 1)) % len(hypotheses)
            pair = sorted({hypotheses[first], hypotheses[second]})
        constraints.append(f":- {', '.join(f'selh({h})' for h in pair)}.")

    lines = [f"hyp({h})." for h in hypotheses]
    lines += [f"definite({o})." for o in definite]
    lines += [f"potential({o})." for o in potential]
    lines += ["selh(X) v nselh(X) :- hyp(X).", "selo(X) v nselo(X) :- potential(X)."]
    lines += _unique(constraints)
    lines += ["#split.", ":- not &necessary[selh,selo,definite]()."]
    program = parse_program('\n'.join(lines), f"<diagnosis n={n} seed={seed}>")
    logger.debug("diagnosis instance n=%d seed=%d: %d definite observations", n, seed, len(definite))
    return program, {'necessary': table}


SETGUESS_RULES = """
in(X) v out(X) :- dom(X).
someIn :- in(X).
r(X) :- &diff[dom,in](X).
:- r(X), someIn.
"""


def gen_setguess(n):
    """dom(1..n) plus the guess whose only answer sets take all or nothing."""
    if n < 1:
        raise ValueError("instances need n >= 1")
    facts = '\n'.join(f"dom({i})." for i in range(1, n + 1))
    return parse_program(facts + SETGUESS_RULES, f"<setguess n={n}>")


@dataclass(frozen=True)
class Instance:
    family: str
    n: int
    seed: int
    program: object
    externals: tuple = ()

    def registry(self):
        return ExternalRegistry.default().with_decls(*self.externals)


def build_instance(family, n, seed):
    if family == 'config':
        program, tables = gen_config_instance(n, seed)
        externals = (load_table_external(tables['m'], 'm', output_arity=1),)
    elif family == 'diagnosis':
        program, tables = gen_diagnosis_instance(n, seed)
        externals = (necessity_external(tables['necessary']),)
    elif family == 'setguess':
        program, externals = gen_setguess(n), ()
    else:
        raise ValueError(f"family must be one of {', '.join(FAMILIES)}")
    return Instance(family, n, seed, program, externals)
