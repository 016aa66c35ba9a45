"""
Tests for blowup towers, chart ownership and resolution.
"""

from fractions import Fraction

from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from core.services.blowup_tower import (
    OWN_DIVISOR,
    OWN_POINT,
    Tower,
    auto_resolve,
    has_real_curve,
    has_real_zero_outside,
    is_rsnc_at,
    plane_singular_points,
    rational_curve_points,
    regular_on_stage,
    tower_resolves,
)
from core.services.errors import TowerError
from core.services.exact_algebra import MPoly, RatFn
from core.services.parsing import parse_ratfn

from .strategies import nonzero_polynomials

ORIGIN = (Fraction(0), Fraction(0))

RESOLUTION_CORPUS = (
    'x^2+y^2', 'x^4+y^2', 'y^2-x^3', 'y^2-x^2*(x+1)', '(x^2+y^2)^2', 'x*y', 'y^2-x^5',
)

# Denominators whose zero set is the origin alone.
POINT_DENOMINATORS = ('x^2+y^2', 'x^4+y^2', 'x^2+y^4', '(x^2+y^2)*(x^2+2*y^2)')

SAMPLES = (Fraction(-1), Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2))


def poly(text):
    return parse_ratfn(text, ('x', 'y')).as_mpoly()


class BlowupTests(SimpleTestCase):
    """A single blowup of the origin."""

    def setUp(self):
        self.tower = Tower.base().blowup(0, (0, 0))

    def test_two_charts_per_blowup(self):
        self.assertEqual(self.tower.steps, 1)
        self.assertEqual([c.id for c in self.tower.charts], [0, 1, 2])
        self.assertEqual(self.tower.chart(1).ownership, OWN_DIVISOR)
        self.assertEqual(self.tower.chart(2).ownership, OWN_POINT)

    def test_chart_maps(self):
        s, t = MPoly.gens(('s1', 't1'))
        self.assertEqual(self.tower.chart(1).map_to_base, (s, s * t))
        u, v = MPoly.gens(('s2', 't2'))
        self.assertEqual(self.tower.chart(2).map_to_base, (u * v, v))

    def test_pullback_factors_exceptional_divisor(self):
        pulled = self.tower.pullback(1, poly('x^2+y^2'))
        s, t = MPoly.gens(('s1', 't1'))
        self.assertEqual(pulled, RatFn(s ** 2 * (t ** 2 + 1)))

    def test_chart_coordinates_round_trip(self):
        f = parse_ratfn('x^3/(x^2+y^2)')
        for chart_id in (1, 2):
            self.assertEqual(self.tower.to_base(self.tower.pullback(chart_id, f), chart_id), f)

    def test_ownership_partitions_the_divisor(self):
        self.assertFalse(self.tower.owns(0, ORIGIN))
        self.assertTrue(self.tower.owns(1, (Fraction(0), Fraction(5))))
        self.assertFalse(self.tower.owns(1, (Fraction(1), Fraction(5))))
        self.assertTrue(self.tower.owns(2, ORIGIN))
        self.assertFalse(self.tower.owns(2, (Fraction(0), Fraction(1))))

    def test_center_outside_owned_region(self):
        with self.assertRaises(TowerError):
            self.tower.blowup(0, (0, 0))
        with self.assertRaises(TowerError):
            self.tower.blowup(2, (0, 1))

    def test_crossing_center(self):
        tower = self.tower.blowup(1, (0, 0))
        tower = tower.blowup(4, (0, 0))
        self.assertEqual(tower.divisor(2).incident, (0, 1))
        with self.assertRaises(TowerError):
            tower.blowup(4, (0, 0))

    def test_rsnc_witness(self):
        witness = is_rsnc_at(self.tower, 1, ORIGIN, self.tower.pullback_poly(1, poly('x^2+y^2')))
        self.assertTrue(witness.holds)
        self.assertEqual(witness.exponents, {0: 2})
        self.assertEqual(witness.unit_value, 1)

    def test_truncate(self):
        tower = self.tower.blowup(1, (0, 0))
        self.assertEqual(tower.truncate(1), self.tower)
        self.assertEqual(tower.truncate(0).steps, 0)
        with self.assertRaises(TowerError):
            tower.truncate(3)

    def test_towers_live_over_the_plane(self):
        with self.assertRaises(TowerError):
            Tower.base(('x', 'y', 'z'))


class ResolutionTests(SimpleTestCase):

    def test_cusp_like_curve_needs_two_blowups(self):
        resolution = auto_resolve(poly('x^4+y^2'))
        tower = resolution.tower
        self.assertEqual(tower.steps, 2)
        self.assertEqual(tower.centers(), [(0, ORIGIN), (1, ORIGIN)])
        self.assertEqual(tower.divisor(1).incident, (0,))
        self.assertTrue(tower_resolves(tower, poly('x^4+y^2')))

    def test_dual_graph_is_a_chain(self):
        tower = auto_resolve(poly('x^4+y^2')).tower
        self.assertEqual(tower.dual_graph(), {frozenset({0, 1})})

    def test_node_resolved_by_one_blowup(self):
        tower = auto_resolve(poly('y^2-x^2-x^3')).tower
        self.assertEqual(tower.steps, 1)

    def test_smooth_curve_needs_nothing(self):
        self.assertEqual(auto_resolve(poly('y-x^2')).tower.steps, 0)

    def test_singular_points(self):
        self.assertEqual(plane_singular_points(poly('y^2-x^3')), [ORIGIN])
        self.assertEqual(plane_singular_points(poly('(x-1)^2+(y+2)^2')), [(Fraction(1), Fraction(-2))])
        self.assertEqual(plane_singular_points(poly('x^2+y^2-1')), [])

    def test_real_zero_sets(self):
        self.assertTrue(has_real_curve(poly('x^2+y^2-1')))
        self.assertFalse(has_real_curve(poly('x^2+y^2')))
        self.assertTrue(has_real_zero_outside(poly('x^2+y^2'), []))
        self.assertFalse(has_real_zero_outside(poly('x^2+y^2'), [ORIGIN]))
        self.assertFalse(has_real_zero_outside(poly('x^2+y^2+1')))


class RegularityTests(SimpleTestCase):

    def test_pole_removed_by_resolution(self):
        f = parse_ratfn('x^3/(x^2+y^2)')
        tower = auto_resolve(f.den).tower
        self.assertFalse(regular_on_stage(tower, 0, f).regular)
        self.assertTrue(regular_on_stage(tower, 1, f).regular)

    def test_pole_on_the_divisor(self):
        f = parse_ratfn('x/(x^2+y^2)')
        tower = auto_resolve(f.den).tower
        record = regular_on_stage(tower, 1, f)
        self.assertFalse(record.regular)
        self.assertIn(1, [chart for chart, _ in record.poles])

    def test_polynomials_are_regular(self):
        self.assertTrue(regular_on_stage(Tower.base(), 0, poly('x^5')).regular)


class ResolutionCorpusTests(SimpleTestCase):

    def test_corpus_resolves_within_budget(self):
        for text in RESOLUTION_CORPUS:
            tower = auto_resolve(poly(text), budget=64).tower
            self.assertLessEqual(tower.steps, 64, text)
            self.assertTrue(tower_resolves(tower, poly(text)), text)

    def test_known_tower_heights(self):
        heights = {text: auto_resolve(poly(text)).tower.steps
                   for text in ('x^2+y^2', 'x^4+y^2', '(x^2+y^2)^2', 'x*y', 'y^2-x^2*(x+1)')}
        self.assertEqual(heights, {'x^2+y^2': 1, 'x^4+y^2': 2, '(x^2+y^2)^2': 1, 'x*y': 1, 'y^2-x^2*(x+1)': 1})

    def test_blowing_up_an_rsnc_point_stays_rsnc(self):
        for text in RESOLUTION_CORPUS:
            f = poly(text)
            tower = auto_resolve(f).tower
            for d in tower.divisors:
                chart_id = d.charts[0]
                for c in SAMPLES:
                    point = (Fraction(0), c)
                    if not tower.owns(chart_id, point):
                        continue
                    if not is_rsnc_at(tower, chart_id, point, tower.pullback_poly(chart_id, f)).holds:
                        continue
                    above = tower.blowup(chart_id, point)
                    divisor_chart, point_chart = above.divisors[-1].charts
                    checks = [(divisor_chart, (Fraction(0), t)) for t in SAMPLES] + [(point_chart, ORIGIN)]
                    for chart, q in checks:
                        witness = is_rsnc_at(above, chart, q, above.pullback_poly(chart, f))
                        self.assertTrue(witness.holds, (text, chart_id, point, chart, q))


class MonomialDenominatorTests(SimpleTestCase):
    """After resolving a denominator, pulled-back denominators are monomials times units."""

    towers = {text: auto_resolve(poly(text)).tower for text in POINT_DENOMINATORS}

    @given(nonzero_polynomials, st.sampled_from(POINT_DENOMINATORS))
    @settings(max_examples=100, deadline=None)
    def test_pulled_back_denominator_is_rsnc(self, p, text):
        tower = self.towers[text]
        f = RatFn(p, poly(text))
        for d in tower.divisors:
            divisor_chart, point_chart = d.charts
            checks = [(divisor_chart, (Fraction(0), t)) for t in SAMPLES] + [(point_chart, ORIGIN)]
            for chart, point in checks:
                if not tower.owns(chart, point):
                    continue
                den = tower.pullback(chart, f).den
                self.assertTrue(is_rsnc_at(tower, chart, point, den).holds, (str(f), chart, point))


class RealZeroDecisionTests(SimpleTestCase):
    """Real zero sets far from the coordinate axes."""

    far_oval = '(x-10)^2+(y-10)^2-1'

    def test_far_oval_is_a_real_curve(self):
        self.assertTrue(has_real_curve(poly(self.far_oval)))
        self.assertTrue(has_real_zero_outside(poly(self.far_oval)))
        self.assertTrue(has_real_curve(poly('(x-1/3)^2+(y-1/3)^2-1/100')))

    def test_far_point_zero(self):
        q = poly('(x-10)^2+(y-7)^2')
        self.assertFalse(has_real_curve(q))
        self.assertTrue(has_real_zero_outside(q))
        self.assertFalse(has_real_zero_outside(q, [(Fraction(10), Fraction(7))]))
        self.assertFalse(has_real_zero_outside(poly('(x-10)^2+(y-7)^2+1/1000')))

    def test_irrational_point_zero(self):
        q = poly('(x^2-2)^2+y^2')
        self.assertFalse(has_real_curve(q))
        self.assertTrue(has_real_zero_outside(q, [ORIGIN]))

    def test_curve_points_lie_on_the_curve(self):
        q = poly(self.far_oval)
        points = rational_curve_points(q)
        self.assertEqual(len(points), 1)
        self.assertEqual(q.evaluate(points[0]), 0)
        self.assertEqual(rational_curve_points(poly('x^2+y^2')), [])
        self.assertEqual(rational_curve_points(poly('x-3')), [(Fraction(3), Fraction(0))])

    def test_far_oval_of_poles(self):
        f = parse_ratfn('1/((x-10)^2+(y-10)^2-1)')
        tower = auto_resolve(f.den).tower
        self.assertEqual(tower.steps, 0)
        record = regular_on_stage(tower, 0, f)
        self.assertFalse(record.regular)
        self.assertEqual(record.poles, [(0, 'real zero of the denominator')])
