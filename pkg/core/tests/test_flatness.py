"""
Tests for flatness certificates and the three-valued regularity tests.
"""

from django.test import SimpleTestCase
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from core.services.blowup_tower import Tower, auto_resolve
from core.services.errors import FlatnessError, UnresolvedTower
from core.services.exact_algebra import INFINITY, RatFn
from core.services.flatness import (
    CERTIFIED_NO,
    CERTIFIED_YES,
    REPRESENTATION,
    RELATIVE_UNDERLINE,
    check_relative_flatness,
    check_rk_flat_representation,
    falsifier_centers,
    k_regulous_test,
    lipschitz_test,
)
from core.services.parsing import parse_ratfn

from .strategies import monomial_multiples

POINT_DENOMINATORS = ('x^2+y^2', 'x^4+y^2', 'x^2+y^4', '(x^2+y^2)*(x^2+2*y^2)')

FAR_OVAL = '(x-10)^2+(y-10)^2-1'


def fn(text):
    return parse_ratfn(text, ('x', 'y'))


class RepresentationTests(SimpleTestCase):

    def setUp(self):
        self.r = fn('x^2+y^2').as_mpoly()
        self.tower = auto_resolve(self.r).tower

    def test_flat_at_k_zero(self):
        certificate = check_rk_flat_representation(fn('x^3'), self.r, 0, self.tower)
        self.assertEqual(certificate.kind, REPRESENTATION)
        self.assertTrue(certificate.passed)

    def test_fails_at_k_one_with_equal_sides(self):
        certificate = check_rk_flat_representation(fn('x^3'), self.r, 1, self.tower)
        self.assertFalse(certificate.passed)
        (row,) = certificate.failing_rows
        self.assertEqual((row.site, row.lhs, row.rhs), ('d0', 4, 4))
        self.assertEqual(row.values, {'ord_q': 3, 'min_ord_dr': 1, 'ord_r': 2})

    def test_zero_numerator_is_flat(self):
        certificate = check_rk_flat_representation(fn('0'), self.r, 3, self.tower)
        self.assertTrue(certificate.passed)
        self.assertIs(certificate.ledger[0].lhs, INFINITY)

    def test_unresolved_tower(self):
        with self.assertRaises(UnresolvedTower):
            check_rk_flat_representation(fn('x^3'), self.r, 0, Tower.base())

    def test_negative_k(self):
        with self.assertRaises(FlatnessError):
            check_rk_flat_representation(fn('x^3'), self.r, -1, self.tower)


class RelativeFlatnessTests(SimpleTestCase):

    def setUp(self):
        self.tower = auto_resolve(fn('x^4+y^2').as_mpoly()).tower

    def test_strict_uses_r_multiplicities(self):
        certificate = check_relative_flatness(fn('y'), 1, self.tower, 'strict')
        self.assertEqual([(row.lhs, row.rhs) for row in certificate.ledger], [(1, 1), (2, 2)])
        self.assertFalse(certificate.passed)

    def test_underline_allows_equality(self):
        certificate = check_relative_flatness(fn('y'), 1, self.tower, 'underline')
        self.assertEqual(certificate.kind, RELATIVE_UNDERLINE)
        self.assertTrue(certificate.passed)

    def test_stage_limits_the_divisors(self):
        certificate = check_relative_flatness(fn('x^7/(x^4+y^2)'), 1, self.tower, 'strict', stage=0)
        self.assertEqual(certificate.ledger, [])
        self.assertTrue(certificate.passed)

    def test_unknown_mode(self):
        with self.assertRaises(FlatnessError):
            check_relative_flatness(fn('x'), 1, self.tower, 'sideways')


class RegularityVerdictTests(SimpleTestCase):

    def test_polynomial_is_regulous(self):
        self.assertEqual(k_regulous_test(fn('x^2*y'), 3).verdict, CERTIFIED_YES)

    def test_continuous_quotient(self):
        verdict = k_regulous_test(fn('x^3/(x^2+y^2)'), 0)
        self.assertEqual(verdict.verdict, CERTIFIED_YES)
        self.assertIsNotNone(verdict.certificate)

    def test_not_once_differentiable(self):
        verdict = k_regulous_test(fn('x^3/(x^2+y^2)'), 1)
        self.assertEqual(verdict.verdict, CERTIFIED_NO)
        self.assertEqual(verdict.witness['kind'], 'two-limits')
        self.assertEqual(verdict.witness['order'], 1)

    def test_lipschitz(self):
        self.assertEqual(lipschitz_test(fn('x^3/(x^2+y^2)')).verdict, CERTIFIED_YES)

    def test_not_lipschitz(self):
        verdict = lipschitz_test(fn('x^2/(x^2+y^2)'))
        self.assertEqual(verdict.verdict, CERTIFIED_NO)
        self.assertIsNotNone(verdict.witness)

    def test_falsifier_centers(self):
        self.assertEqual(falsifier_centers(fn('(x-1)^2+y^2').as_mpoly()), [(1, 0)])
        self.assertEqual(falsifier_centers(fn('3').as_mpoly()), [])

    def test_pole_oval_far_from_the_axes(self):
        f = fn(f'1/({FAR_OVAL})')
        self.assertEqual(k_regulous_test(f, 0).verdict, CERTIFIED_NO)
        self.assertEqual(lipschitz_test(f).verdict, CERTIFIED_NO)
        centers = falsifier_centers(f.den)
        self.assertTrue(centers)
        self.assertTrue(all(f.den.evaluate(c) == 0 for c in centers))

    def test_flat_quotient_at_both_orders(self):
        self.assertEqual(k_regulous_test(fn('x^4/(x^2+y^2)'), 0).verdict, CERTIFIED_YES)
        self.assertEqual(k_regulous_test(fn('x^4/(x^2+y^2)'), 1).verdict, CERTIFIED_YES)


class RelativeFlatnessPropertyTests(SimpleTestCase):

    towers = {text: auto_resolve(fn(text).as_mpoly()).tower for text in POINT_DENOMINATORS}

    @given(st.integers(min_value=0, max_value=6).flatmap(monomial_multiples),
           st.sampled_from(POINT_DENOMINATORS), st.integers(min_value=0, max_value=2))
    @settings(max_examples=100, deadline=None)
    def test_relatively_flat_functions_have_flat_representations(self, q, text, k):
        tower = self.towers[text]
        f = RatFn(q, fn(text).as_mpoly())
        assume(not f.is_polynomial())
        strict = check_relative_flatness(f, k, tower, 'strict')
        underline = check_relative_flatness(f, k, tower, 'underline')
        representation = check_rk_flat_representation(RatFn(f.num), f.den, k, tower)
        if strict.passed:
            self.assertTrue(underline.passed)
            self.assertTrue(representation.passed, (str(f), k))
        if k > 0:
            if strict.passed:
                self.assertTrue(check_relative_flatness(f, k - 1, tower, 'strict').passed)
            if representation.passed:
                self.assertTrue(check_rk_flat_representation(RatFn(f.num), f.den, k - 1, tower).passed)

    def test_products_with_tower_regular_functions(self):
        flat = (('x^3/(x^2+y^2)', 0), ('x^4/(x^2+y^2)', 1), ('x^7/(x^4+y^2)', 1))
        for text, k in flat:
            f = fn(text)
            tower = auto_resolve(f.den).tower
            self.assertTrue(check_relative_flatness(f, k, tower, 'strict').passed, text)
            for h in ('y', 'x-y', 'x^2/(x^2+y^2)'):
                verdict = k_regulous_test(f * fn(h), k)
                self.assertNotEqual(verdict.verdict, CERTIFIED_NO, (text, h, verdict.witness))
