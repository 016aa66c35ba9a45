"""
Divisorial calculus over a blowup tower: orders along exceptional divisors,
chain-rule derivatives in chart coordinates, r-multiplicities and Rees
valuation sets.
"""

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .blowup_tower import Tower, auto_resolve, has_real_curve, resolution_defects
from .config import DEFAULT_CONFIG
from .errors import TowerError, UnresolvedTower, ZeroFunctionError
from .exact_algebra import INFINITY, MPoly, RatFn, as_ratfn
from .reports import canonical

logger = logging.getLogger(__name__)

REQUIRED = 'required'
HEURISTICALLY_REQUIRED = 'heuristically-required'
UNKNOWN = 'unknown'


def _base_ratfn(tower: Tower, f) -> RatFn:
    return as_ratfn(f, tower.base_vars)


# =============================================================================
# Orders
# =============================================================================

def ord_in_chart(tower: Tower, divisor_id: int, f, chart_id: int) -> int:
    """Order along a divisor of a function written in the coordinates of an ancestor chart."""
    divisor = tower.divisor(divisor_id)
    birth = divisor.charts[0]
    f = as_ratfn(f, tower.chart(chart_id).vars)
    if f.is_zero():
        raise ZeroFunctionError(f"ord of the zero function along divisor {divisor_id}")
    local = tower.transport(f, chart_id, birth)
    return local.uadic_order(tower.chart(birth).vars[0])


def ord(tower: Tower, divisor_id: int, f) -> int:
    """u-adic order of the pullback of a base function at the divisor."""
    return ord_in_chart(tower, divisor_id, _base_ratfn(tower, f), 0)


def ord_or_infinity(tower: Tower, divisor_id: int, f):
    f = _base_ratfn(tower, f)
    return INFINITY if f.is_zero() else ord(tower, divisor_id, f)


def ord_table(tower: Tower, f) -> Dict[int, int]:
    f = _base_ratfn(tower, f)
    return {d.id: ord(tower, d.id, f) for d in tower.divisors}


def min_partial_order(tower: Tower, divisor_id: int, f):
    """min_j ord_d(df/dx_j); infinite when every partial vanishes."""
    f = _base_ratfn(tower, f)
    orders = [ord(tower, divisor_id, p) for p in (f.derive(v) for v in tower.base_vars) if not p.is_zero()]
    return min(orders) if orders else INFINITY


# =============================================================================
# Chain rule
# =============================================================================

def chain_derivative(tower: Tower, chart_id: int, f, chart_var: str) -> RatFn:
    """Partial derivative of the pullback with respect to a chart variable."""
    return tower.pullback(chart_id, _base_ratfn(tower, f)).derive(chart_var)


def jacobian(tower: Tower, chart_id: int) -> Tuple[Tuple[MPoly, MPoly], Tuple[MPoly, MPoly]]:
    """Rows are base coordinates, columns chart variables."""
    chart = tower.chart(chart_id)
    return tuple(tuple(m.diff(v) for v in chart.vars) for m in chart.map_to_base)


def jacobian_determinant(tower: Tower, chart_id: int) -> MPoly:
    (a, b), (c, d) = jacobian(tower, chart_id)
    return a * d - b * c


def inverse_jacobian(tower: Tower, chart_id: int) -> Tuple[Tuple[RatFn, RatFn], Tuple[RatFn, RatFn]]:
    (a, b), (c, d) = jacobian(tower, chart_id)
    det = a * d - b * c
    if det.is_zero():
        raise TowerError(f"Chart {chart_id} has a degenerate map to the base")
    return ((d / det, -b / det), (-c / det, a / det))


def base_partials_from_chart(tower: Tower, chart_id: int, f) -> Tuple[RatFn, RatFn]:
    """Recover the pulled-back base partials from chart partials."""
    chart = tower.chart(chart_id)
    pulled = tower.pullback(chart_id, _base_ratfn(tower, f))
    fu, fv = (pulled.derive(v) for v in chart.vars)
    (i00, i01), (i10, i11) = inverse_jacobian(tower, chart_id)
    return fu * i00 + fv * i10, fu * i01 + fv * i11


def chain_rule_holds(tower: Tower, chart_id: int, f) -> bool:
    """[df/dx df/dy] J == [df/du df/dv] as reduced identities."""
    f = _base_ratfn(tower, f)
    chart = tower.chart(chart_id)
    fx, fy = (tower.pullback(chart_id, f.derive(v)) for v in tower.base_vars)
    (a, b), (c, d) = jacobian(tower, chart_id)
    lhs = (fx * a + fy * c, fx * b + fy * d)
    rhs = tuple(chain_derivative(tower, chart_id, f, v) for v in chart.vars)
    return lhs == rhs


# =============================================================================
# r-multiplicity
# =============================================================================

def r_multiplicity(tower: Tower, divisor_id: int) -> int:
    """1 over a free center, k1 + 1 on one divisor, k1 + k2 at a crossing."""
    cache = tower.kd_cache
    if divisor_id in cache:
        return cache[divisor_id]
    incident = tower.divisor(divisor_id).incident
    if not incident:
        value = 1
    elif len(incident) == 1:
        value = r_multiplicity(tower, incident[0]) + 1
    else:
        value = sum(r_multiplicity(tower, i) for i in incident)
    cache[divisor_id] = value
    return value


@dataclass
class KdBound:
    divisor_id: int
    value: int
    witness: Optional[MPoly]
    searched: int


def _kd_family(tower: Tower, divisor_id: int, degree_bound: int, seed: int) -> List[MPoly]:
    x, y = MPoly.gens(tower.base_vars)
    a, b = tower.divisor(divisor_id).base_point
    X, Y = x - a, y - b
    over = tower.divisors_over((a, b))
    slopes = {Fraction(0)}
    if over:
        first_chart = over[0].charts[0]
        slopes.update(d.center[1] for d in over if d.center_chart == first_chart)
    directions = [(X, Y - c * X) for c in sorted(slopes)]
    family = []
    for U, V in directions:
        for i, j in product(range(degree_bound + 1), repeat=2):
            if 0 < i + j <= degree_bound:
                family.append(U ** i * V ** j)
    rng = random.Random(seed)
    monomials = family[:]
    for _ in range(4 * degree_bound):
        picks = rng.sample(monomials, min(3, len(monomials)))
        family.append(sum((rng.choice((-2, -1, 1, 2)) * p for p in picks), MPoly.const(tower.base_vars, 0)))
    return family


def kd_lower_bound(tower: Tower, divisor_id: int, degree_bound: int = DEFAULT_CONFIG.kd_degree_bound,
                   seed: int = DEFAULT_CONFIG.seed) -> KdBound:
    """Best observed drop ord_d(f) - min ord_d(df) over a search family."""
    if degree_bound < 1:
        raise TowerError("degree_bound must be at least 1")
    best, witness = 0, None
    family = _kd_family(tower, divisor_id, degree_bound, seed)
    for f in family:
        if f.is_zero() or f.is_constant():
            continue
        drop = ord(tower, divisor_id, f) - min_partial_order(tower, divisor_id, f)
        if drop > best:
            best, witness = drop, f
    logger.debug("kd lower bound for divisor %d: %d over %d candidates", divisor_id, best, len(family))
    return KdBound(divisor_id, best, witness, len(family))


# =============================================================================
# Rees valuations
# =============================================================================

@dataclass(frozen=True)
class ValuationSite:
    """An exceptional divisor of a tower or a real curve component in the plane."""

    kind: str
    divisor_id: Optional[int] = None
    generator: Optional[MPoly] = None

    @property
    def label(self) -> str:
        if self.kind == 'exceptional':
            return f"d{self.divisor_id}"
        return f"Z({self.generator.to_text()})"

    def order(self, tower: Tower, g) -> int:
        g = _base_ratfn(tower, g)
        if g.is_zero():
            raise ZeroFunctionError(f"Order of the zero function at {self.label}")
        if self.kind == 'exceptional':
            return ord(tower, self.divisor_id, g)
        return g.order_along(self.generator)


@dataclass
class ReesEntry:
    site: ValuationSite
    ord_f: int
    status: str = UNKNOWN


@dataclass
class RValuationSet:
    f: RatFn
    tower: Tower
    entries: List[ReesEntry] = field(default_factory=list)

    def as_record(self) -> Dict:
        return {
            'f': canonical(self.f),
            'tower_steps': self.tower.steps,
            'divisors': [
                {'site': e.site.label, 'ord': e.ord_f, 'status': e.status}
                for e in self.entries
            ],
        }


def _resolving_tower(f: RatFn) -> Tower:
    product_poly = f.num * f.den
    if product_poly.is_constant():
        return Tower.base(f.vars)
    return auto_resolve(product_poly).tower


def rees_valuations(f, tower: Optional[Tower] = None,
                    degree_bound: int = DEFAULT_CONFIG.degree_bound) -> RValuationSet:
    """Valuation sites with ord_d(f) > 0 on a tower resolving num(f)*den(f)."""
    if not isinstance(f, RatFn):
        f = as_ratfn(f, tower.base_vars if tower else ('x', 'y'))
    if f.is_zero():
        raise ZeroFunctionError("Rees valuations of the zero function")
    if tower is None:
        tower = _resolving_tower(f)
    elif not (f.num * f.den).is_constant() and resolution_defects(tower, f.num * f.den):
        raise UnresolvedTower(f"Tower does not resolve {f.num * f.den}")
    entries = []
    for d in tower.divisors:
        value = ord(tower, d.id, f)
        if value > 0:
            entries.append(ReesEntry(ValuationSite('exceptional', divisor_id=d.id), value))
    if not f.num.is_constant():
        for factor, multiplicity in f.num.squarefree():
            if has_real_curve(factor):
                site = ValuationSite('strict', generator=factor)
                entries.append(ReesEntry(site, f.order_along(factor), HEURISTICALLY_REQUIRED))
    result = RValuationSet(f, tower, entries)
    _prune(result, degree_bound)
    return result


def _prune(rvals: RValuationSet, degree_bound: int):
    """Mark sites where some monomial attains a strictly smallest ratio."""
    tower = rvals.tower
    if len(rvals.entries) == 1:
        rvals.entries[0].status = REQUIRED
        return
    x, y = MPoly.gens(tower.base_vars)
    centers = tower.base_points() or [(Fraction(0), Fraction(0))]
    for a, b in centers:
        forms = (x - a, y - b)
        base_orders = [[e.site.order(tower, form) for form in forms] for e in rvals.entries]
        for i, j in product(range(degree_bound + 1), repeat=2):
            if not 0 < i + j <= degree_bound:
                continue
            ratios = [Fraction(i * ox + j * oy, e.ord_f)
                      for e, (ox, oy) in zip(rvals.entries, base_orders)]
            smallest = min(ratios)
            if ratios.count(smallest) == 1:
                winner = rvals.entries[ratios.index(smallest)]
                if winner.status == UNKNOWN:
                    winner.status = REQUIRED


def v_value(rvals: RValuationSet, g) -> Union[Fraction, object]:
    """min over the site set of ord(g)/ord(f)."""
    g = _base_ratfn(rvals.tower, g)
    if g.is_zero():
        raise ZeroFunctionError("v of the zero function")
    if not rvals.entries:
        return INFINITY
    return min(Fraction(e.site.order(rvals.tower, g), e.ord_f) for e in rvals.entries)


# =============================================================================
# Audits
# =============================================================================

@dataclass
class InequalityRow:
    divisor_id: int
    chart_id: int
    lhs: object
    rhs: object
    variable: str = ''

    @property
    def holds(self) -> bool:
        return self.lhs >= self.rhs


def determinant_inequality(tower: Tower) -> List[InequalityRow]:
    """ord_d(det J) >= k_d + min(ord_d x, ord_d y) - 1 in charts where d is a coordinate line."""
    rows = []
    x, y = MPoly.gens(tower.base_vars)
    for d in tower.divisors:
        rhs = r_multiplicity(tower, d.id) + min(ord(tower, d.id, x), ord(tower, d.id, y)) - 1
        for chart in tower.visible_charts(d.id):
            generator = chart.generator(d.id)
            if generator not in MPoly.gens(chart.vars):
                continue
            det = jacobian_determinant(tower, chart.id)
            rows.append(InequalityRow(d.id, chart.id, det.order_along(generator), rhs))
    return rows


def derivative_drop_inequality(tower: Tower, f) -> List[InequalityRow]:
    """Chart derivatives lose at most one order along each divisor.

    In the chart a divisor is blown up from, every coordinate cuts the center
    and may lose one order. In a chart where the divisor is the coordinate
    line {u = 0}, only d/du may lose one; the other coordinate keeps the order.
    """
    f = _base_ratfn(tower, f)
    rows = []
    for d in tower.divisors:
        parent = tower.chart(d.center_chart)
        local = tower.pullback(parent.id, f)
        if local.is_zero():
            continue
        base_order = ord_in_chart(tower, d.id, local, parent.id)
        for name in parent.vars:
            partial = local.derive(name)
            if partial.is_zero():
                continue
            rows.append(InequalityRow(d.id, parent.id, ord_in_chart(tower, d.id, partial, parent.id),
                                      base_order - 1, name))
        for chart in tower.visible_charts(d.id):
            generator = chart.generator(d.id)
            if generator not in MPoly.gens(chart.vars):
                continue
            pulled = tower.pullback(chart.id, f)
            if pulled.is_zero():
                continue
            order = pulled.order_along(generator)
            for name in chart.vars:
                partial = pulled.derive(name)
                if partial.is_zero():
                    continue
                cuts = generator == MPoly.var(chart.vars, name)
                rows.append(InequalityRow(d.id, chart.id, partial.order_along(generator),
                                          order - 1 if cuts else order, name))
    return rows


def some_partial_drops(tower: Tower, divisor_id: int, f) -> bool:
    """Some first partial has strictly smaller order than a function with positive order."""
    return min_partial_order(tower, divisor_id, f) < ord(tower, divisor_id, f)


def derivative_gap(tower: Tower, divisor_id: int, f):
    """min_j ord_d(df/dx_j) - ord_d(f)."""
    lowest = min_partial_order(tower, divisor_id, f)
    return INFINITY if lowest is INFINITY else lowest - ord(tower, divisor_id, f)
