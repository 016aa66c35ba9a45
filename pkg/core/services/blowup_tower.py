"""
Blowup Tower Service.

A tower records point blowups of the plane. Every blowup of a point (a, b)
in a chart with coordinates (u, v) creates two charts:

    chart A:  u = a + s,      v = b + s*t      (divisor s = 0)
    chart B:  u = a + s'*t',  v = b + t'       (divisor t' = 0)

Sibling charts overlap, so each chart owns a region of points it is
responsible for: the base chart owns the plane, chart A owns its divisor
line s = 0, chart B owns only its origin. Points already blown up are
removed from their chart. All scanning and blowing up happens in the
owning chart.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .errors import (
    AlgebraError,
    BudgetExceeded,
    NonAdmissibleCenter,
    NonRationalCenter,
    TowerError,
    ZeroFunctionError,
)
from .exact_algebra import MPoly, RatFn, real_common_zeros, to_rat

logger = logging.getLogger(__name__)

Point = Tuple[Fraction, Fraction]

OWN_PLANE = 'plane'
OWN_DIVISOR = 'divisor'
OWN_POINT = 'point'

DEFAULT_BLOWUP_BUDGET = 64

# Sample coordinates for grids and for scanning lines in more than two variables.
SAMPLE_LINES = tuple(Fraction(n, d) for n, d in (
    (-3, 1), (-2, 1), (-3, 2), (-1, 1), (-1, 2), (-1, 3), (0, 1),
    (1, 3), (1, 2), (1, 1), (3, 2), (2, 1), (3, 1), (5, 7), (-7, 5),
))


def as_point(values: Sequence) -> Point:
    if len(values) != 2:
        raise TowerError(f"Expected a plane point, got {values}")
    return (to_rat(values[0]), to_rat(values[1]))


# =============================================================================
# Records
# =============================================================================

@dataclass(frozen=True)
class VisibleDivisor:
    divisor_id: int
    generator: MPoly


@dataclass(frozen=True)
class Chart:
    id: int
    parent_id: Optional[int]
    vars: Tuple[str, str]
    map_to_base: Tuple[MPoly, MPoly]
    local_map: Tuple[MPoly, MPoly]
    coords_in_base: Tuple[RatFn, RatFn]
    visible: Tuple[VisibleDivisor, ...]
    ownership: str
    step: int

    def generator(self, divisor_id: int) -> Optional[MPoly]:
        for vd in self.visible:
            if vd.divisor_id == divisor_id:
                return vd.generator
        return None

    def through(self, point: Point) -> List[VisibleDivisor]:
        """Visible divisors passing through a chart point."""
        return [vd for vd in self.visible if vd.generator.evaluate(point) == 0]


@dataclass(frozen=True)
class Divisor:
    id: int
    birth_step: int
    center_chart: int
    center: Point
    incident: Tuple[int, ...]
    charts: Tuple[int, int]
    base_point: Point


@dataclass(frozen=True)
class Adjacency:
    divisors: Tuple[int, int]
    chart_id: int
    point: Point


@dataclass
class RsncWitness:
    holds: bool
    exponents: Dict[int, int]
    unit_value: Optional[Fraction]
    residual: MPoly


@dataclass
class SncReport:
    chart_id: int
    point: Point
    defect: Optional[str]
    divisor_id: Optional[int] = None


@dataclass
class Resolution:
    tower: 'Tower'
    reports: List[SncReport]


# =============================================================================
# Tower
# =============================================================================

@dataclass(frozen=True)
class Tower:
    base_vars: Tuple[str, str]
    charts: Tuple[Chart, ...]
    divisors: Tuple[Divisor, ...] = ()
    adjacency: Tuple[Adjacency, ...] = ()
    kd_cache: Dict[int, int] = field(default_factory=dict, compare=False, hash=False, repr=False)

    @classmethod
    def base(cls, variables: Sequence[str] = ('x', 'y')) -> 'Tower':
        variables = tuple(variables)
        if len(variables) != 2:
            raise TowerError(f"Towers live over the plane; got variables {variables}")
        x, y = MPoly.gens(variables)
        chart = Chart(
            id=0,
            parent_id=None,
            vars=variables,
            map_to_base=(x, y),
            local_map=(x, y),
            coords_in_base=(RatFn(x), RatFn(y)),
            visible=(),
            ownership=OWN_PLANE,
            step=0,
        )
        return cls(base_vars=variables, charts=(chart,))

    # -- lookups --------------------------------------------------------------

    @property
    def steps(self) -> int:
        return len(self.divisors)

    def chart(self, chart_id: int) -> Chart:
        if not 0 <= chart_id < len(self.charts):
            raise TowerError(f"No chart {chart_id}")
        return self.charts[chart_id]

    def divisor(self, divisor_id: int) -> Divisor:
        if not 0 <= divisor_id < len(self.divisors):
            raise TowerError(f"No divisor {divisor_id}")
        return self.divisors[divisor_id]

    def centers(self) -> List[Tuple[int, Point]]:
        return [(d.center_chart, d.center) for d in self.divisors]

    def blown_points(self, chart_id: int, before_step: Optional[int] = None) -> Set[Point]:
        limit = self.steps if before_step is None else before_step
        return {d.center for d in self.divisors[:limit] if d.center_chart == chart_id}

    def owns(self, chart_id: int, point: Point) -> bool:
        chart = self.chart(chart_id)
        if point in self.blown_points(chart_id):
            return False
        if chart.ownership == OWN_DIVISOR:
            return point[0] == 0
        if chart.ownership == OWN_POINT:
            return point == (0, 0)
        return True

    def visible_charts(self, divisor_id: int) -> List[Chart]:
        return [c for c in self.charts if c.generator(divisor_id) is not None]

    def charts_at_stage(self, stage: int) -> List[Chart]:
        return [c for c in self.charts if c.step <= stage]

    def divisors_at_stage(self, stage: int) -> Tuple[Divisor, ...]:
        return self.divisors[:stage]

    def ancestors(self, chart_id: int) -> List[int]:
        chain = []
        current = self.chart(chart_id).parent_id
        while current is not None:
            chain.append(current)
            current = self.charts[current].parent_id
        return chain

    def base_points(self, stage: Optional[int] = None) -> List[Point]:
        """Images in the plane of the exceptional locus, in first-seen order."""
        points: List[Point] = []
        for d in self.divisors[:self.steps if stage is None else stage]:
            if d.base_point not in points:
                points.append(d.base_point)
        return points

    def divisors_over(self, base_point: Point) -> List[Divisor]:
        """Divisors lying over a point of the plane."""
        return [d for d in self.divisors if d.base_point == base_point]

    def dual_graph(self) -> Set[frozenset]:
        return {frozenset(a.divisors) for a in self.adjacency}

    # -- maps -----------------------------------------------------------------

    def pullback(self, chart_id: int, f) -> RatFn:
        chart = self.chart(chart_id)
        f = f if isinstance(f, RatFn) else RatFn(f)
        if f.vars != self.base_vars:
            raise TowerError(f"Pullback expects base variables {self.base_vars}, got {f.vars}")
        mapping = dict(zip(self.base_vars, chart.map_to_base))
        return f.substitute(mapping, chart.vars)

    def pullback_poly(self, chart_id: int, f: MPoly) -> MPoly:
        chart = self.chart(chart_id)
        return f.substitute(dict(zip(self.base_vars, chart.map_to_base)), chart.vars)

    def map_between(self, ancestor_id: int, chart_id: int) -> Tuple[MPoly, MPoly]:
        """Ancestor chart coordinates expressed in the descendant chart's variables."""
        chart = self.chart(chart_id)
        if chart_id == ancestor_id:
            return MPoly.gens(chart.vars)
        if chart.parent_id is None:
            raise TowerError(f"Chart {ancestor_id} is not an ancestor of {chart_id}")
        parent = self.charts[chart.parent_id]
        upper = self.map_between(ancestor_id, parent.id)
        mapping = dict(zip(parent.vars, chart.local_map))
        return tuple(p.substitute(mapping, chart.vars) for p in upper)

    def transport(self, f: RatFn, ancestor_id: int, chart_id: int) -> RatFn:
        """Pull a function given in ancestor chart coordinates down to a descendant chart."""
        ancestor = self.chart(ancestor_id)
        images = self.map_between(ancestor_id, chart_id)
        return f.substitute(dict(zip(ancestor.vars, images)), self.chart(chart_id).vars)

    def to_base(self, f: RatFn, chart_id: int) -> RatFn:
        """Express a chart-local function as a base rational function."""
        chart = self.chart(chart_id)
        if chart_id == 0:
            return f
        return f.substitute_rational(dict(zip(chart.vars, chart.coords_in_base)))

    # -- construction ---------------------------------------------------------

    def blowup(self, chart_id: int, point: Sequence) -> 'Tower':
        return blowup(self, chart_id, point)

    def truncate(self, stage: int) -> 'Tower':
        """The tower after its first ``stage`` blowups."""
        if not 0 <= stage <= self.steps:
            raise TowerError(f"Stage {stage} outside 0..{self.steps}")
        if stage == self.steps:
            return self
        tower = Tower.base(self.base_vars)
        for d in self.divisors[:stage]:
            tower = tower.blowup(d.center_chart, d.center)
        return tower


def _gradient(poly: MPoly, point: Point) -> Tuple[Fraction, Fraction]:
    return tuple(poly.diff(v).evaluate(point) for v in poly.vars)


def blowup(tower: Tower, chart_id: int, point: Sequence) -> Tower:
    """Blow up a rational point of a chart, returning the extended tower."""
    point = as_point(point)
    chart = tower.chart(chart_id)
    if not tower.owns(chart_id, point):
        raise TowerError(
            f"Point {tuple(map(str, point))} is outside the domain of chart {chart_id} "
            f"({chart.ownership}) or already blown up")
    incident = chart.through(point)
    if len(incident) > 2:
        raise NonAdmissibleCenter("More than two divisors through the center")
    gradients = []
    for vd in incident:
        g = _gradient(vd.generator, point)
        if g == (0, 0):
            raise NonAdmissibleCenter(f"Divisor {vd.divisor_id} is singular at the center")
        gradients.append(g)
    if len(gradients) == 2:
        (a1, b1), (a2, b2) = gradients
        if a1 * b2 - a2 * b1 == 0:
            raise NonAdmissibleCenter("Divisors through the center are tangent")

    a, b = point
    u, v = chart.vars
    U, V = chart.coords_in_base
    new_id = tower.steps
    id_a, id_b = len(tower.charts), len(tower.charts) + 1
    vars_a = (f"s{id_a}", f"t{id_a}")
    vars_b = (f"s{id_b}", f"t{id_b}")
    s_a, t_a = MPoly.gens(vars_a)
    s_b, t_b = MPoly.gens(vars_b)
    local_a = (s_a + a, t_a * s_a + b)
    local_b = (s_b * t_b + a, t_b + b)
    coords_a = (U - a, (V - b) / (U - a))
    coords_b = ((U - a) / (V - b), V - b)

    children = []
    adjacency = [adj for adj in tower.adjacency
                 if not (adj.chart_id == chart_id and adj.point == point)]
    for cid, cvars, local, coords, exceptional, ownership in (
            (id_a, vars_a, local_a, coords_a, vars_a[0], OWN_DIVISOR),
            (id_b, vars_b, local_b, coords_b, vars_b[1], OWN_POINT)):
        mapping = dict(zip((u, v), local))
        map_to_base = tuple(m.substitute(mapping, cvars) for m in chart.map_to_base)
        visible = []
        for vd in chart.visible:
            pulled = vd.generator.substitute(mapping, cvars)
            e = pulled.uadic_order(exceptional)
            strict = pulled.exquo(MPoly.var(cvars, exceptional) ** e)
            if strict.is_constant():
                continue
            strict = strict.primitive_part()
            visible.append(VisibleDivisor(vd.divisor_id, strict))
            adjacency.extend(_meetings(new_id, vd.divisor_id, cid, strict, ownership))
        visible.append(VisibleDivisor(new_id, MPoly.var(cvars, exceptional)))
        children.append(Chart(
            id=cid,
            parent_id=chart_id,
            vars=cvars,
            map_to_base=map_to_base,
            local_map=local,
            coords_in_base=coords,
            visible=tuple(visible),
            ownership=ownership,
            step=new_id + 1,
        ))

    base_point = tuple(m.evaluate((0, 0)) for m in children[0].map_to_base)
    divisor = Divisor(
        id=new_id,
        birth_step=new_id,
        center_chart=chart_id,
        center=point,
        incident=tuple(sorted(vd.divisor_id for vd in incident)),
        charts=(id_a, id_b),
        base_point=base_point,
    )
    logger.debug("Blowup %d at %s in chart %d (incident %s)",
                 new_id, tuple(map(str, point)), chart_id, divisor.incident)
    return Tower(
        base_vars=tower.base_vars,
        charts=tower.charts + tuple(children),
        divisors=tower.divisors + (divisor,),
        adjacency=tuple(adjacency),
    )


def _meetings(new_id: int, old_id: int, chart_id: int, generator: MPoly, ownership: str) -> List[Adjacency]:
    s, t = generator.vars
    pair = tuple(sorted((new_id, old_id)))
    if ownership == OWN_POINT:
        if generator.evaluate((0, 0)) == 0:
            return [Adjacency(pair, chart_id, (Fraction(0), Fraction(0)))]
        return []
    restricted = generator.specialize({s: 0})
    if restricted.is_constant():
        return []
    return [Adjacency(pair, chart_id, (Fraction(0), root)) for root, _ in restricted.rational_roots()]


# =============================================================================
# Normal crossings
# =============================================================================

def is_rsnc_at(tower: Tower, chart_id: int, point: Sequence, f: MPoly) -> RsncWitness:
    """Is f a monomial in exceptional generators times a unit at the point?"""
    point = as_point(point)
    if f.is_zero():
        raise ZeroFunctionError("rsnc test of the zero polynomial")
    chart = tower.chart(chart_id)
    residual = f
    exponents: Dict[int, int] = {}
    for vd in chart.through(point):
        e = residual.order_along(vd.generator)
        if e:
            residual = residual.exquo(vd.generator ** e)
        exponents[vd.divisor_id] = e
    value = residual.evaluate(point)
    return RsncWitness(value != 0, exponents, value if value != 0 else None, residual)


def strict_part(chart: Chart, transform: MPoly) -> MPoly:
    """Squarefree transform with every visible exceptional factor removed."""
    strict = transform.squarefree_part()
    for vd in chart.visible:
        while not strict.is_constant() and vd.generator.divides(strict):
            strict = strict.exquo(vd.generator)
    return strict


def snc_defect(tower: Tower, chart_id: int, point: Point, transform: MPoly) -> Optional[str]:
    """Reason the total transform fails to be snc at the point, or None."""
    chart = tower.chart(chart_id)
    strict = strict_part(chart, transform)
    if strict.evaluate(point) != 0:
        return None
    gradient = _gradient(strict, point)
    if gradient == (0, 0):
        return 'singular strict transform'
    through = chart.through(point)
    if len(through) >= 2:
        return 'strict transform through a crossing of divisors'
    if through:
        ga, gb = _gradient(through[0].generator, point)
        if gradient[0] * gb - gradient[1] * ga == 0:
            return 'strict transform tangent to a divisor'
    return None


def plane_singular_points(poly: MPoly) -> List[Point]:
    """Rational singular points of a squarefree bivariate polynomial."""
    x, y = poly.vars
    if poly.is_constant() or poly.degree_in(x) == 0 or poly.degree_in(y) == 0:
        return []
    fx, fy = poly.diff(x), poly.diff(y)
    eliminants = []
    for partner in (fx, fy, fx + fy, fx + 2 * fy):
        if partner.is_zero():
            continue
        res = poly.resultant(partner, x)
        if not res.is_zero():
            eliminants.append(res)
    if not eliminants:
        return []
    common = eliminants[0]
    for res in eliminants[1:]:
        common = common.gcd(res)
    points = []
    for factor, _ in common.univariate_factors():
        if factor.degree() > 1:
            if factor.count_real_roots():
                raise NonRationalCenter(
                    f"Singular points over irrational y-coordinates of {poly}", factor.to_text())
            continue
        y0 = factor.linear_variable()[1]
        slices = [p.specialize({y: y0}) for p in (poly, fx, fy)]
        line = None
        for s in slices:
            if not s.is_zero():
                line = s if line is None else line.gcd(s)
        if line is None or line.is_constant():
            continue
        for lin, _ in line.univariate_factors():
            if lin.degree() > 1:
                if lin.count_real_roots():
                    raise NonRationalCenter(
                        f"Singular points over irrational x-coordinates of {poly}", lin.to_text())
                continue
            candidate = (lin.linear_variable()[1], y0)
            if all(p.evaluate(candidate) == 0 for p in (poly, fx, fy)):
                points.append(candidate)
    return sorted(set(points))


def candidate_points(tower: Tower, chart_id: int, transform: MPoly) -> List[Point]:
    """Owned points of the chart where the transform might fail to be snc."""
    chart = tower.chart(chart_id)
    strict = strict_part(chart, transform)
    if chart.ownership == OWN_PLANE:
        found = plane_singular_points(strict)
    elif chart.ownership == OWN_POINT:
        found = [(Fraction(0), Fraction(0))]
    else:
        s, t = chart.vars
        found = []
        if not strict.is_constant():
            restricted = strict.specialize({s: 0})
            for factor, multiplicity in restricted.univariate_factors():
                if factor.degree() == 1:
                    found.append((Fraction(0), factor.linear_variable()[1]))
                elif multiplicity > 1 and factor.count_real_roots():
                    raise NonRationalCenter(
                        f"Tangency at irrational points of divisor in chart {chart_id}", factor.to_text())
    return [p for p in found if tower.owns(chart_id, p)]


def auto_resolve(f: MPoly, budget: int = DEFAULT_BLOWUP_BUDGET) -> Resolution:
    """Blow up non-snc points of the total transform of f until none remain."""
    if f.is_zero():
        raise ZeroFunctionError("Cannot resolve the zero polynomial")
    tower = Tower.base(f.vars)
    reports: List[SncReport] = []
    queue = deque((0, p) for p in candidate_points(tower, 0, f))
    while queue:
        chart_id, point = queue.popleft()
        transform = tower.pullback_poly(chart_id, f)
        defect = snc_defect(tower, chart_id, point, transform)
        if defect is None:
            reports.append(SncReport(chart_id, point, None))
            continue
        if tower.steps >= budget:
            raise BudgetExceeded(f"Resolution of {f} needs more than {budget} blowups")
        tower = tower.blowup(chart_id, point)
        reports.append(SncReport(chart_id, point, defect, tower.steps - 1))
        for child in tower.divisors[-1].charts:
            child_transform = tower.pullback_poly(child, f)
            queue.extend((child, p) for p in candidate_points(tower, child, child_transform))
    logger.info("Resolved %s with %d blowup(s)", f, tower.steps)
    return Resolution(tower, reports)


def resolution_defects(tower: Tower, f: MPoly) -> List[SncReport]:
    """Every owned point of the tower where the total transform of f is not snc."""
    defects = []
    for chart in tower.charts:
        transform = tower.pullback_poly(chart.id, f)
        try:
            points = candidate_points(tower, chart.id, transform)
        except NonRationalCenter as exc:
            defects.append(SncReport(chart.id, (Fraction(0), Fraction(0)), str(exc)))
            continue
        for point in points:
            defect = snc_defect(tower, chart.id, point, transform)
            if defect is not None:
                defects.append(SncReport(chart.id, point, defect))
    return defects


def tower_resolves(tower: Tower, f: MPoly) -> bool:
    return not resolution_defects(tower, f)


# =============================================================================
# Real zero sets
# =============================================================================

def _critical_polynomial(factor: MPoly) -> Tuple[str, str, MPoly]:
    """lc * Res(factor, d factor) for the projection along the second used variable.

    Between its real roots the fibres of an irreducible factor have a
    constant number of simple real roots.
    """
    x, y = factor.used_vars()
    discriminant = factor.resultant(factor.diff(y), y).with_vars(factor.vars)
    return x, y, factor.leading_coefficient_in(y) * discriminant


def _generic_fibres(factor: MPoly) -> List[Tuple[Fraction, MPoly]]:
    """Fibres of an irreducible bivariate factor over one abscissa per generic interval."""
    x, _, critical = _critical_polynomial(factor)
    return [(x0, factor.specialize({x: x0})) for x0 in critical.separating_points()]


def _sampled_sign_change(factor: MPoly) -> bool:
    for name in factor.vars:
        for c in SAMPLE_LINES:
            line = factor.specialize({name: c})
            if line.is_constant():
                continue
            for part, multiplicity in line.squarefree():
                if multiplicity % 2 and len(part.used_vars()) == 1 and part.count_real_roots():
                    return True
    return False


def _factor_has_real_curve(factor: MPoly) -> bool:
    used = factor.used_vars()
    if len(used) == 1:
        return len(factor.vars) > 1 and factor.count_real_roots() > 0
    if len(used) > 2:
        return _sampled_sign_change(factor)
    return any(fibre.count_real_roots() for _, fibre in _generic_fibres(factor))


def has_real_curve(poly: MPoly) -> bool:
    """True when some irreducible factor vanishes along a real curve.

    Decided exactly for polynomials in at most two variables; more variables
    fall back to scanning coordinate lines.
    """
    if poly.is_constant():
        return False
    return any(_factor_has_real_curve(factor) for factor in poly.irreducible_factors())


def rational_curve_points(poly: MPoly) -> List[Tuple[Fraction, ...]]:
    """A rational point on each real curve of a plane polynomial, where one turns up.

    Fibres are tried over the generic abscissae, then over the rational
    critical ones.
    """
    points = []
    if poly.is_constant() or len(poly.vars) != 2:
        return points
    for factor in poly.irreducible_factors():
        if not _factor_has_real_curve(factor):
            continue
        used = factor.used_vars()
        if len(used) == 1:
            roots = factor.rational_roots()
            if roots:
                r = roots[0][0]
                points.append((r, Fraction(0)) if used[0] == poly.vars[0] else (Fraction(0), r))
            continue
        x, _, critical = _critical_polynomial(factor)
        abscissae = critical.separating_points() + [r for r, _ in critical.rational_roots()]
        for x0 in abscissae:
            roots = factor.specialize({x: x0}).rational_roots()
            if roots:
                y0 = roots[0][0]
                points.append((x0, y0) if x == poly.vars[0] else (y0, x0))
                break
    return points


def has_real_zero_outside(poly: MPoly, excluded: Iterable[Point] = ()) -> bool:
    """Does the polynomial vanish at a real point not in ``excluded``?

    Off its real curves a plane factor only vanishes at isolated real
    singular points, which are solved for exactly.
    """
    excluded = set(excluded)
    if poly.is_zero():
        return True
    if poly.is_constant():
        return False
    for factor in poly.irreducible_factors():
        used = factor.used_vars()
        if len(used) == 1:
            if factor.count_real_roots():
                return True
            continue
        if _factor_has_real_curve(factor):
            return True
        try:
            singular = real_common_zeros([factor] + [factor.diff(v) for v in used])
        except AlgebraError as exc:
            logger.warning("Real zeros of %s undecided, assuming one: %s", factor, exc)
            return True
        if any(None in point or point not in excluded for point in singular):
            return True
    return False


# =============================================================================
# Regularity on a stage
# =============================================================================

@dataclass
class RegularityRecord:
    stage: int
    regular: bool
    poles: List[Tuple[int, str]] = field(default_factory=list)

    def as_record(self) -> Dict:
        return {
            'stage': self.stage,
            'regular': self.regular,
            'poles': [{'chart': c, 'where': w} for c, w in self.poles],
        }


def _owned_poles(tower: Tower, chart: Chart, den: MPoly, excluded: Set[Point]) -> Optional[str]:
    if den.is_constant():
        return None
    if chart.ownership == OWN_PLANE:
        return 'real zero of the denominator' if has_real_zero_outside(den, excluded) else None
    if chart.ownership == OWN_POINT:
        origin = (Fraction(0), Fraction(0))
        if origin not in excluded and den.evaluate(origin) == 0:
            return 'pole at the chart origin'
        return None
    s, t = chart.vars
    line = den.specialize({s: 0})
    if line.is_zero():
        return 'pole along the exceptional divisor'
    for factor, _ in line.univariate_factors():
        if factor.degree() == 1:
            root = factor.linear_variable()[1]
            if (Fraction(0), root) not in excluded:
                return f"pole at {s}=0, {t}={root}"
        elif factor.count_real_roots():
            return f"pole on the divisor at roots of {factor.to_text()}"
    return None


def regular_on_stage(tower: Tower, stage: int, f) -> RegularityRecord:
    """Does the pullback of f have no real pole on the stage's blown-up plane?

    The owned regions of the charts alive at a stage partition its points,
    so each chart is only inspected on the region it owns.
    """
    f = f if isinstance(f, RatFn) else RatFn(f)
    record = RegularityRecord(stage, True)
    if f.is_polynomial():
        return record
    for chart in tower.charts_at_stage(stage):
        den = tower.pullback(chart.id, f).den
        excluded = tower.blown_points(chart.id, before_step=stage)
        problem = _owned_poles(tower, chart, den, excluded)
        if problem is not None:
            record.regular = False
            record.poles.append((chart.id, problem))
    return record
