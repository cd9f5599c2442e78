from django.core.exceptions import ImproperlyConfigured
from django.test import SimpleTestCase, override_settings

from engine.exceptions import BoundExceeded
from engine.limits import Limits, get_limits, parse_limits


class LimitsTests(SimpleTestCase):
    def test_check(self):
        limits = Limits()
        limits.check('max_atoms', 20)
        with self.assertRaises(BoundExceeded) as caught:
            limits.check('max_atoms', 21)
        self.assertEqual(caught.exception.limit, 'max_atoms')
        self.assertEqual(caught.exception.value, 21)

    def test_override_keeps_the_rest(self):
        limits = Limits().override(max_atoms=5)
        self.assertEqual(limits.max_atoms, 5)
        self.assertEqual(limits.max_ir_domain, Limits().max_ir_domain)

    @override_settings(ASPIR_LIMITS={'max_atoms': 7, 'retired_bound': 1})
    def test_settings(self):
        limits = get_limits()
        self.assertEqual(limits.max_atoms, 7)
        self.assertEqual(limits.max_term_depth, 3)

    @override_settings(ASPIR_LIMITS={})
    def test_defaults_come_from_the_dataclass(self):
        self.assertEqual(get_limits(), Limits())


class ParseLimitsTests(SimpleTestCase):
    def test_empty(self):
        self.assertEqual(parse_limits(''), {})

    def test_entries(self):
        self.assertEqual(parse_limits('max_atoms=18, max_ir_domain=8'), {'max_atoms': 18, 'max_ir_domain': 8})

    def test_entries_override_the_defaults(self):
        with override_settings(ASPIR_LIMITS=parse_limits('max_term_depth=5')):
            self.assertEqual(get_limits(), Limits(max_term_depth=5))

    def test_unknown_entry(self):
        with self.assertRaises(ImproperlyConfigured):
            parse_limits('max_speed=3')

    def test_not_a_number(self):
        with self.assertRaises(ImproperlyConfigured):
            parse_limits('max_atoms=many')
