"""
Tests for power flatness, sums of squares and the power rewriting of decompositions.
"""

from fractions import Fraction

from django.test import SimpleTestCase

from core.services.errors import NotPsd, SosError
from core.services.flatness import CERTIFIED_YES, lipschitz_test
from core.services.parsing import parse_ratfn
from core.services.sos import (
    check_power_flatness,
    check_sos,
    four_squares,
    power_form_holds,
    rational_square_split,
    regularity_class,
    rewrite_power_form,
    synth_sos_snc,
    theorem_b,
)


def fn(text):
    return parse_ratfn(text, ('x', 'y'))


class PowerFlatnessTests(SimpleTestCase):

    def test_sum_of_two_squares(self):
        result = check_power_flatness(fn('x^2+y^2'), 1, derivative_condition=True)
        self.assertTrue(result.underline_passed)
        self.assertFalse(result.strict_passed)
        self.assertFalse(result.derivative_condition)
        self.assertEqual(result.parity, {0: True})
        self.assertEqual(result.zeros_checked, [(0, 0)])

    def test_quartic(self):
        self.assertTrue(check_power_flatness(fn('x^4+y^4'), 2).underline_passed)

    def test_constant_is_vacuous(self):
        result = check_power_flatness(fn('3'), 1)
        self.assertTrue(result.underline_passed)
        self.assertIsNone(result.strict_passed)

    def test_k_must_be_positive(self):
        with self.assertRaises(SosError):
            check_power_flatness(fn('x^2'), 0)

    def test_sums_of_even_powers(self):
        # (f, k, ords per divisor, strict verdict)
        corpus = [
            ('x^2+y^2', 1, [2], False),
            ('x^4+y^4', 2, [4], False),
            ('x^4+y^4', 1, [4], True),
            ('x^2+y^4', 1, [2, 4], False),
            ('x^6+y^6', 2, [6], True),
            ('x^4+y^8', 2, [4, 8], False),
        ]
        for text, k, ords, strict in corpus:
            result = check_power_flatness(fn(text), k, derivative_condition=True)
            self.assertEqual([row.values['ord'] for row in result.underline.ledger], ords, text)
            self.assertTrue(result.underline_passed, text)
            self.assertIs(result.strict_passed, strict, text)
            self.assertTrue(all(result.parity.values()), text)
            self.assertEqual(result.zeros_checked, [(0, 0)], text)


class SosCheckTests(SimpleTestCase):

    def test_exact_identity(self):
        certificate = check_sos(fn('x^2*y^2*(x^2+y^2)'), [fn('x^2*y'), fn('x*y^2')], 1)
        self.assertTrue(certificate.passed)
        self.assertEqual(certificate.verdict, 'pass')
        for square in certificate.squares:
            self.assertEqual(lipschitz_test(square).verdict, CERTIFIED_YES)

    def test_residual_reported(self):
        certificate = check_sos(fn('(x^2+y^2)^2'), [fn('x^2'), fn('y^2')], 1)
        self.assertFalse(certificate.identity_holds)
        self.assertEqual(certificate.residual, fn('2*x^2*y^2'))


class SynthesisTests(SimpleTestCase):

    def test_even_part_times_monomials(self):
        synthesis = synth_sos_snc(fn('x^2*y^2*(x^2+y^2)'))
        self.assertEqual(len(synthesis.squares), 2)
        self.assertTrue(synthesis.certificate.passed)

    def test_perfect_square(self):
        self.assertEqual(synth_sos_snc(fn('(x^2+y^2)^2')).squares, [fn('x^2+y^2')])

    def test_synthesized_squares_are_lipschitz(self):
        for text in ('x^2*y^2*(x^2+y^2)', '(x^2+y^2)^2', 'x^2*(x^2+y^2)'):
            synthesis = synth_sos_snc(fn(text))
            self.assertTrue(synthesis.squares, text)
            self.assertTrue(synthesis.certificate.passed, text)
            for square in synthesis.squares:
                self.assertEqual(lipschitz_test(square).verdict, CERTIFIED_YES, (text, str(square)))

    def test_quadratic_residual(self):
        squares = synth_sos_snc(fn('1+x+x^2')).squares
        self.assertEqual(squares, [fn('x+1/2'), fn('3/4'), fn('1/4'), fn('1/4'), fn('1/4')])

    def test_motzkin_is_unsupported(self):
        motzkin = fn('x^4*y^2+x^2*y^4-3*x^2*y^2+1')
        synthesis = synth_sos_snc(motzkin)
        self.assertFalse(synthesis.supported)
        self.assertEqual(synthesis.blocking, motzkin.as_mpoly())
        self.assertEqual(synthesis.as_record()['verdict'], 'unsupported')

    def test_indefinite_polynomial(self):
        with self.assertRaises(NotPsd) as ctx:
            synth_sos_snc(fn('x^2-y^2'))
        self.assertIsNotNone(ctx.exception.point)

    def test_rational_functions_rejected(self):
        with self.assertRaises(SosError):
            synth_sos_snc(fn('1/(1+x^2)'))


class IntegerSquareTests(SimpleTestCase):

    def test_four_squares(self):
        self.assertEqual(four_squares(12), (3, 1, 1, 1))
        self.assertEqual(four_squares(7), (2, 1, 1, 1))
        self.assertEqual(four_squares(0), (0, 0, 0, 0))

    def test_rational_square_split(self):
        self.assertEqual(rational_square_split(Fraction(9, 4)), [Fraction(3, 2)])
        parts = rational_square_split(Fraction(3, 4))
        self.assertEqual(sum(p * p for p in parts), Fraction(3, 4))
        with self.assertRaises(SosError):
            rational_square_split(Fraction(0))


class PowerRewritingTests(SimpleTestCase):

    def test_identity_for_small_cases(self):
        for n in range(1, 5):
            for m in range(1, 7):
                for l in range(m):
                    self.assertTrue(power_form_holds(n, m, l), (n, m, l))

    def test_requires_m_above_l(self):
        with self.assertRaises(SosError):
            rewrite_power_form(2, 1, 1)

    def test_regularity_class(self):
        expected = {(0, 0): 0, (0, 1): 2, (0, 2): 4, (1, 0): 1, (1, 1): 4,
                    (1, 2): 7, (2, 0): 2, (2, 1): 6, (2, 2): 10}
        for (k, l), value in expected.items():
            self.assertEqual(regularity_class(k, l), value)

    def test_continuous_quotient(self):
        record = theorem_b(fn('x^3').as_mpoly(), fn('x^2+y^2').as_mpoly(), 0, 1, 1)
        self.assertEqual((record.regularity_class, record.shifted_m), (2, 2))
        self.assertTrue(record.passed)
        nonzero = [t for t in record.terms if not t.value.is_zero()]
        self.assertEqual([(t.stage, t.value) for t in nonzero], [(1, fn('x^6/(x^2+y^2)'))])

    def test_negative_parameters(self):
        with self.assertRaises(SosError):
            theorem_b(fn('x').as_mpoly(), fn('1').as_mpoly(), -1, 0, 1)
