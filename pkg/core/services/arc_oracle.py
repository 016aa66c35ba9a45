"""
Arc Oracle Service.

Exact sampling of rational functions along polynomial arcs through a point.
Values are exact rationals at the scales t = 10^-j; trends are classified by
fixed ratio rules, never by floating point.
"""

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from .config import DEFAULT_CONFIG
from .errors import ArcIndeterminate, PoleError
from .exact_algebra import MPoly, RatFn, partial, to_rat

logger = logging.getLogger(__name__)

TO_ZERO = 'to-zero'
BOUNDED = 'bounded'
DIVERGING = 'diverging'
INCONCLUSIVE = 'inconclusive'

GROWTH_FACTOR = 4
TREND_WINDOW = 4
BOUNDED_WINDOW = 4
STABLE_TOLERANCE = Fraction(1, 1000)
LIMIT_SEPARATION = Fraction(1, 10)

PARABOLA_COEFFICIENTS = (Fraction(1), Fraction(-1), Fraction(2), Fraction(-2), Fraction(1, 2))


def default_scales(exponents: Sequence[int] = DEFAULT_CONFIG.scale_exponents) -> Tuple[Fraction, ...]:
    return tuple(Fraction(1, 10 ** j) for j in exponents)


@dataclass(frozen=True)
class Arc:
    """t -> center + (c_1(t), ..., c_n(t)) with components vanishing at t = 0."""

    components: Tuple[MPoly, ...]
    center: Tuple[Fraction, ...]
    label: str = ''

    @classmethod
    def from_coefficients(cls, center: Sequence, coefficients: Sequence[Dict[int, object]],
                          label: str = '') -> 'Arc':
        """Each component is given as {power of t: coefficient}."""
        components = tuple(
            MPoly.from_terms(('t',), {(power,): c for power, c in comp.items()})
            for comp in coefficients
        )
        return cls(components, tuple(to_rat(c) for c in center), label)

    def at(self, t: Fraction) -> Tuple[Fraction, ...]:
        return tuple(c + comp.evaluate((t,)) for c, comp in zip(self.center, self.components))

    def describe(self) -> str:
        if self.label:
            return self.label
        return '(' + ', '.join(comp.to_text() for comp in self.components) + ')'

    def as_record(self) -> Dict:
        return {'arc': self.describe(), 'center': list(self.center)}


@dataclass
class SampleTable:
    arc: Arc
    scales: Tuple[Fraction, ...]
    values: List[Optional[Fraction]]
    verdict: str

    @property
    def defined(self) -> List[Fraction]:
        return [v for v in self.values if v is not None]

    @property
    def limit_estimate(self) -> Optional[Fraction]:
        defined = self.defined
        return defined[-1] if defined else None

    @property
    def stabilises(self) -> bool:
        defined = self.defined
        if len(defined) < 2 or self.verdict == DIVERGING:
            return False
        return abs(defined[-1] - defined[-2]) <= STABLE_TOLERANCE

    def as_record(self) -> Dict:
        return {
            'arc': self.arc.describe(),
            'scales': list(self.scales),
            'values': ['pole' if v is None else v for v in self.values],
            'verdict': self.verdict,
            'limit_estimate': self.limit_estimate,
        }


def classify(values: Sequence[Fraction]) -> str:
    """Trend of a value sequence sampled at shrinking scales."""
    if not values:
        return INCONCLUSIVE
    if all(v == 0 for v in values):
        return TO_ZERO
    window = [abs(v) for v in values[-TREND_WINDOW:]]
    if len(window) == TREND_WINDOW:
        if all(a != 0 and b >= GROWTH_FACTOR * a for a, b in zip(window, window[1:])):
            return DIVERGING
        if all(a != 0 and GROWTH_FACTOR * b <= a for a, b in zip(window, window[1:])):
            return TO_ZERO
    bound = BOUNDED_WINDOW * max(Fraction(1), abs(values[0]))
    if all(abs(v) <= bound for v in values):
        return BOUNDED
    return INCONCLUSIVE


def arc_sample(f: RatFn, arc: Arc, scales: Optional[Sequence[Fraction]] = None) -> SampleTable:
    """Exact values of f along an arc; poles are recorded as None."""
    scales = tuple(scales or default_scales())
    values: List[Optional[Fraction]] = []
    for t in scales:
        try:
            values.append(f.evaluate(arc.at(t)))
        except PoleError:
            values.append(None)
    defined = [v for v in values if v is not None]
    if not defined:
        raise ArcIndeterminate(f"{f} is undefined along {arc.describe()} at every scale")
    return SampleTable(arc, scales, values, classify(defined))


# =============================================================================
# Batteries
# =============================================================================

def _unit(dim: int, i: int, sign: int = 1) -> List[Dict[int, Fraction]]:
    return [{1: Fraction(sign)} if j == i else {} for j in range(dim)]


def arc_battery(center: Sequence, seed: int = DEFAULT_CONFIG.seed,
                random_arcs: int = DEFAULT_CONFIG.random_arcs) -> List[Arc]:
    """Axes, diagonals, parabolas and seeded random arcs through a point of the plane or space."""
    center = tuple(to_rat(c) for c in center)
    dim = len(center)
    arcs: List[Arc] = []
    for i in range(dim):
        for sign in (1, -1):
            arcs.append(Arc.from_coefficients(center, _unit(dim, i, sign)))
    for signs in product((1, -1), repeat=dim - 1):
        arcs.append(Arc.from_coefficients(center, [{1: 1}] + [{1: s} for s in signs]))
    for c in PARABOLA_COEFFICIENTS:
        if dim == 2:
            arcs.append(Arc.from_coefficients(center, [{1: 1}, {2: c}]))
            arcs.append(Arc.from_coefficients(center, [{2: c}, {1: 1}]))
        else:
            arcs.append(Arc.from_coefficients(center, [{1: 1}, {2: c}] + [{1: c}] * (dim - 2)))
            arcs.append(Arc.from_coefficients(center, [{2: c}, {1: 1}] + [{2: c}] * (dim - 2)))
    rng = random.Random(seed)
    for _ in range(random_arcs):
        coefficients = []
        for _ in range(dim):
            coefficients.append({
                1: Fraction(rng.randint(-3, 3), rng.randint(1, 3)),
                2: Fraction(rng.randint(-3, 3), rng.randint(1, 3)),
                3: Fraction(rng.randint(-2, 2), rng.randint(1, 2)),
            })
        if all(not c[1] and not c[2] and not c[3] for c in coefficients):
            coefficients[0][1] = Fraction(1)
        arcs.append(Arc.from_coefficients(center, coefficients))
    return arcs


@dataclass
class DiscontinuityWitness:
    first: SampleTable
    second: SampleTable

    def as_record(self) -> Dict:
        return {'first': self.first.as_record(), 'second': self.second.as_record()}


def discontinuity_witness(tables: Sequence[SampleTable]) -> Optional[DiscontinuityWitness]:
    """Two stabilising arcs whose limit estimates are clearly apart."""
    stable = [t for t in tables if t.stabilises]
    for i, first in enumerate(stable):
        for second in stable[i + 1:]:
            if abs(first.limit_estimate - second.limit_estimate) > LIMIT_SEPARATION:
                return DiscontinuityWitness(first, second)
    return None


# =============================================================================
# Falsifier
# =============================================================================

@dataclass
class FuzzReport:
    f: RatFn
    k: int
    center: Tuple[Fraction, ...]
    falsified: bool
    witness: Optional[Dict] = None
    tables: Dict[str, List[SampleTable]] = field(default_factory=dict)
    skipped: int = 0

    @property
    def verdict(self) -> str:
        return 'falsified' if self.falsified else 'no-divergence'

    def as_record(self) -> Dict:
        return {
            'f': self.f,
            'k': self.k,
            'center': list(self.center),
            'verdict': self.verdict,
            'witness': self.witness,
            'derivatives': {
                name: [t.verdict for t in tables] for name, tables in sorted(self.tables.items())
            },
            'skipped_arcs': self.skipped,
        }


def derivatives_of_order(f: RatFn, k: int) -> Dict[str, RatFn]:
    """All partial derivatives of total order k, keyed by their multi-index text."""
    result = {}
    for counts in product(range(k + 1), repeat=len(f.vars)):
        if sum(counts) != k:
            continue
        name = 'd' + ''.join(f"{v}{c}" for v, c in zip(f.vars, counts) if c) if k else 'f'
        result[name] = partial(f, dict(zip(f.vars, counts)))
    return result


def fuzz(f: RatFn, k: int, center: Optional[Sequence] = None, seed: int = DEFAULT_CONFIG.seed,
         random_arcs: int = DEFAULT_CONFIG.random_arcs,
         scales: Optional[Sequence[Fraction]] = None) -> FuzzReport:
    """Look for a k-th partial that diverges or has two different limits at the center."""
    center = tuple(to_rat(c) for c in (center or (0,) * len(f.vars)))
    battery = arc_battery(center, seed, random_arcs)
    report = FuzzReport(f, k, center, False)
    for name, derivative in derivatives_of_order(f, k).items():
        tables = []
        for arc in battery:
            try:
                tables.append(arc_sample(derivative, arc, scales))
            except ArcIndeterminate:
                report.skipped += 1
        report.tables[name] = tables
        if report.falsified:
            continue
        diverging = next((t for t in tables if t.verdict == DIVERGING), None)
        if diverging is not None:
            report.falsified = True
            report.witness = {'derivative': name, 'kind': 'diverging', 'table': diverging.as_record()}
            continue
        split = discontinuity_witness(tables)
        if split is not None:
            report.falsified = True
            report.witness = {'derivative': name, 'kind': 'two-limits', 'arcs': split.as_record()}
    if report.falsified:
        logger.info("Falsifier found %s for %s at order %d", report.witness['kind'], f, k)
    return report
