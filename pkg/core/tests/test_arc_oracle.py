"""
Tests for the arc sampling oracle and the falsifier.
"""

from fractions import Fraction

from django.test import SimpleTestCase

from core.services.arc_oracle import (
    BOUNDED,
    DIVERGING,
    INCONCLUSIVE,
    TO_ZERO,
    Arc,
    arc_battery,
    arc_sample,
    classify,
    derivatives_of_order,
    discontinuity_witness,
    fuzz,
)
from core.services.errors import ArcIndeterminate
from core.services.parsing import parse_ratfn

SPACE = ('x', 'y', 'z')


class ClassifyTests(SimpleTestCase):

    def test_trends(self):
        self.assertEqual(classify([]), INCONCLUSIVE)
        self.assertEqual(classify([0, 0, 0]), TO_ZERO)
        self.assertEqual(classify([1, 10, 100, 1000]), DIVERGING)
        self.assertEqual(classify([1, Fraction(1, 10), Fraction(1, 100), Fraction(1, 1000)]), TO_ZERO)
        self.assertEqual(classify([Fraction(-1, 4)] * 5), BOUNDED)
        self.assertEqual(classify([1, 100, 3, 2]), INCONCLUSIVE)


class SamplingTests(SimpleTestCase):

    def setUp(self):
        product = parse_ratfn('x^4/(x^2+z^2) * x^4/(x^4+y^2)', SPACE)
        self.derivative = product.derive('y')

    def test_derivative_sign(self):
        self.assertEqual(self.derivative, parse_ratfn('-2*x^8*y/((x^2+z^2)*(x^4+y^2)^2)', SPACE))

    def test_constant_along_the_twisted_arc(self):
        arc = Arc.from_coefficients((0, 0, 0), [{1: 1}, {2: 1}, {1: 1}])
        table = arc_sample(self.derivative, arc)
        self.assertEqual(set(table.values), {Fraction(-1, 4)})
        self.assertEqual(table.verdict, BOUNDED)
        self.assertTrue(table.stabilises)
        self.assertEqual(table.limit_estimate, Fraction(-1, 4))

    def test_zero_along_the_plane_x_zero(self):
        arc = Arc.from_coefficients((0, 0, 0), [{}, {1: 1}, {1: 1}])
        self.assertEqual(arc_sample(self.derivative, arc).verdict, TO_ZERO)

    def test_two_limits(self):
        twisted = arc_sample(self.derivative, Arc.from_coefficients((0, 0, 0), [{1: 1}, {2: 1}, {1: 1}]))
        flat = arc_sample(self.derivative, Arc.from_coefficients((0, 0, 0), [{}, {1: 1}, {1: 1}]))
        witness = discontinuity_witness([twisted, flat])
        self.assertIsNotNone(witness)
        self.assertEqual({witness.first.limit_estimate, witness.second.limit_estimate}, {Fraction(-1, 4), 0})
        self.assertIsNone(discontinuity_witness([twisted, twisted]))

    def test_undefined_everywhere(self):
        arc = Arc.from_coefficients((0, 0), [{}, {}])
        with self.assertRaises(ArcIndeterminate):
            arc_sample(parse_ratfn('1/(x^2+y^2)'), arc)


class BatteryTests(SimpleTestCase):

    def test_seeded_battery_is_reproducible(self):
        first = [a.describe() for a in arc_battery((0, 0), seed=3)]
        self.assertEqual(first, [a.describe() for a in arc_battery((0, 0), seed=3)])
        self.assertNotEqual(first, [a.describe() for a in arc_battery((0, 0), seed=4)])

    def test_arcs_pass_through_the_center(self):
        for arc in arc_battery((1, 2), random_arcs=3):
            self.assertEqual(arc.at(Fraction(0)), (1, 2))

    def test_space_battery(self):
        arcs = arc_battery((0, 0, 0), random_arcs=0)
        self.assertTrue(all(len(arc.components) == 3 for arc in arcs))


class FuzzTests(SimpleTestCase):

    def test_discontinuous_quotient(self):
        report = fuzz(parse_ratfn('x^2/(x^2+y^2)'), 0)
        self.assertTrue(report.falsified)
        self.assertEqual(report.witness['kind'], 'two-limits')
        self.assertEqual(report.verdict, 'falsified')

    def test_continuous_quotient(self):
        report = fuzz(parse_ratfn('x^3/(x^2+y^2)'), 0)
        self.assertFalse(report.falsified)
        self.assertEqual(report.verdict, 'no-divergence')

    def test_pole_diverges(self):
        report = fuzz(parse_ratfn('x/(x^2+y^2)'), 0)
        self.assertEqual(report.witness['kind'], 'diverging')

    def test_derivative_names(self):
        names = derivatives_of_order(parse_ratfn('x^3/(x^2+y^2)'), 1)
        self.assertEqual(sorted(names), ['dx1', 'dy1'])
        self.assertEqual(list(derivatives_of_order(parse_ratfn('x'), 0)), ['f'])
