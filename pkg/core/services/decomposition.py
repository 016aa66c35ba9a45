"""
Decomposition Service.

Splits a k-regulous function f into pieces f = g_1 + ... + g_t + f_t following
the blowup order of a tower resolving its denominator. Piece i is regular and
relatively strict-k flat on stage i; every choice made along the way is
replayed as a certificate before it is accepted.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import factorial
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .blowup_tower import RegularityRecord, Tower, auto_resolve, regular_on_stage, resolution_defects
from .config import DEFAULT_CONFIG, LabConfig
from .divisorial import ord_or_infinity, r_multiplicity
from .errors import DecompositionError, PoleError, SubstitutionError, UnresolvedTower
from .exact_algebra import INFINITY, MPoly, RatFn, as_ratfn, partial, to_rat
from .flatness import FlatnessCertificate, check_relative_flatness

logger = logging.getLogger(__name__)

CASE_FREE = 'free-center'
CASE_CROSSING = 'crossing'
CASE_DIVISOR = 'divisor-point'


# =============================================================================
# Jets and limits
# =============================================================================

def _multi_indices(count: int, k: int) -> Iterator[Tuple[int, ...]]:
    for index in product(range(k + 1), repeat=count):
        if sum(index) <= k:
            yield index


def _taylor(variables: Sequence[str], point: Sequence[Fraction], values: Dict[Tuple[int, ...], Fraction]) -> MPoly:
    shifted = [MPoly.var(variables, v) - c for v, c in zip(variables, point)]
    total = MPoly.const(variables, 0)
    for index, value in values.items():
        if not value:
            continue
        weight = 1
        term = MPoly.const(variables, 1)
        for e, base in zip(index, shifted):
            weight *= factorial(e)
            term = term * base ** e
        total = total + term * (value / weight)
    return total


def jet(f, point: Sequence, k: int) -> MPoly:
    """k-th Taylor polynomial at a point where the denominator does not vanish."""
    f = f if isinstance(f, RatFn) else RatFn(f)
    point = tuple(to_rat(c) for c in point)
    if f.den.evaluate(point) == 0:
        raise PoleError(f"{f} has a pole at {tuple(map(str, point))}")
    values = {}
    for index in _multi_indices(len(f.vars), k):
        values[index] = partial(f, dict(zip(f.vars, index))).evaluate(point)
    return _taylor(f.vars, point, values)


def limit_value(tower: Tower, g: RatFn, point: Sequence) -> Optional[Fraction]:
    """Exact limit of g at a base point, certified through the divisors over it."""
    point = tuple(to_rat(c) for c in point)
    if g.is_zero():
        return Fraction(0)
    if g.den.evaluate(point) != 0:
        return g.evaluate(point)
    over = tower.divisors_over(point)
    if not over:
        return None
    birth = tower.chart(over[0].charts[0])
    s, t = birth.vars
    pulled = tower.pullback(birth.id, g)
    order = pulled.uadic_order(s)
    if order < 0:
        return None
    if order > 0:
        candidate = Fraction(0)
    else:
        restricted = pulled.substitute({s: 0, t: MPoly.var(birth.vars, t)}, birth.vars)
        if not restricted.is_constant():
            return None
        candidate = restricted.as_mpoly().constant_value()
    difference = g - candidate
    for d in over:
        value = ord_or_infinity(tower, d.id, difference)
        if value is not INFINITY and value <= 0:
            return None
    return candidate


def limit_jet(f: RatFn, point: Sequence, k: int, tower: Tower) -> Optional[MPoly]:
    """Taylor polynomial built from certified limits of the partials; None if one is missing."""
    point = tuple(to_rat(c) for c in point)
    values = {}
    for index in _multi_indices(len(f.vars), k):
        value = limit_value(tower, partial(f, dict(zip(f.vars, index))), point)
        if value is None:
            return None
        values[index] = value
    return _taylor(f.vars, point, values)


# =============================================================================
# Clearing factors
# =============================================================================

def point_square(variables: Sequence[str], point: Sequence) -> MPoly:
    """(x - a)^2 + (y - b)^2."""
    total = MPoly.const(variables, 0)
    for v, c in zip(variables, point):
        total = total + (MPoly.var(variables, v) - to_rat(c)) ** 2
    return total


def clearing_polynomial(variables: Sequence[str], points: Sequence) -> MPoly:
    h = MPoly.const(variables, 1)
    for p in points:
        h = h * point_square(variables, p)
    return h


def clearing_factor(tower: Tower, stage: int, target, k: int,
                    exponent_budget: int = DEFAULT_CONFIG.exponent_budget) -> Tuple[MPoly, int]:
    """h vanishing on the images of the stage's divisors, and the least N with target*h^N flat."""
    target = as_ratfn(target, tower.base_vars)
    points = tower.base_points(stage)
    h = clearing_polynomial(tower.base_vars, points)
    if not points:
        return h, 0
    for exponent in range(exponent_budget + 1):
        if check_relative_flatness(target * h ** exponent, k, tower, 'strict', stage).passed:
            return h, exponent
    raise DecompositionError(
        f"No exponent up to {exponent_budget} makes ({target})*h^N relatively {k}-flat")


def point_vanishing_function(tower: Tower, chart_id: int, point: Sequence) -> RatFn:
    """(u^2 + v^2)/(1 + u^2 + v^2) centred at a chart point, in base coordinates."""
    chart = tower.chart(chart_id)
    square = point_square(chart.vars, point)
    local = RatFn(square, square + 1)
    return tower.to_base(local, chart_id)


# =============================================================================
# Stage splits
# =============================================================================

@dataclass
class StageSplit:
    stage: int
    case: str
    regular_part: RatFn
    remainder: RatFn
    g: Optional[RatFn] = None
    exponent: Optional[int] = None
    certificates: List[FlatnessCertificate] = field(default_factory=list)
    regularity: Optional[RegularityRecord] = None

    def as_record(self) -> Dict:
        return {
            'stage': self.stage,
            'case': self.case,
            'regular_part': self.regular_part,
            'remainder': self.remainder,
            'g': self.g,
            'exponent': self.exponent,
            'certificates': [c.verdict for c in self.certificates],
        }


def _verify(tower: Tower, stage: int, k: int, first: RatFn, second: RatFn, ledger: list):
    c1 = check_relative_flatness(first, k, tower, 'strict', stage)
    regularity = regular_on_stage(tower, stage, first)
    c2 = check_relative_flatness(second, k, tower, 'strict', stage + 1)
    ledger.extend([c1, regularity, c2])
    return c1.passed and regularity.regular and c2.passed, [c1, c2], regularity


def _clearing_exponents(k: int, m: int, budget: int) -> Sequence[int]:
    if k > 0:
        return [2 * k * m]
    return range(0, budget + 1)


def _cleared(f: RatFn, g: RatFn, first: RatFn, second: RatFn, H: RatFn, exponent: int):
    denominator = g * g + H ** exponent
    return g * first / denominator, (g * second + f * H ** exponent) / denominator


def _try_candidate(f, g, first, second, H, tower, stage, k, m, config, case, ledger) -> Optional[StageSplit]:
    if g == 1:
        ok, certs, reg = _verify(tower, stage, k, first, second, ledger)
        if ok:
            return StageSplit(stage, case, first, second, None, None, certs, reg)
        return None
    for exponent in _clearing_exponents(k, m, config.exponent_budget):
        p1, p2 = _cleared(f, g, first, second, H, exponent)
        ok, certs, reg = _verify(tower, stage, k, p1, p2, ledger)
        if ok:
            logger.debug("Stage %d cleared with exponent %d", stage, exponent)
            return StageSplit(stage, case, p1, p2, g, exponent, certs, reg)
    return None


def _split_free(f: RatFn, tower: Tower, stage: int, k: int, config: LabConfig, ledger: list) -> StageSplit:
    center = tower.divisor(stage).center
    others = [p for p in tower.base_points(stage) if p != center]
    h = clearing_polynomial(tower.base_vars, others)
    H = RatFn(point_square(tower.base_vars, center))
    m = r_multiplicity(tower, stage)
    exponents = [0] if not others else range(1, config.exponent_budget + 1)
    for n in exponents:
        g = RatFn(h ** n)
        target = f * g
        taylor = limit_jet(target, center, k, tower)
        if taylor is None:
            raise DecompositionError(
                f"Free center {tuple(map(str, center))}: derivatives of order <= {k} of {f} "
                f"have no limit there", ledger)
        first = RatFn(taylor)
        split = _try_candidate(f, g, first, target - first, H, tower, stage, k, m, config,
                               CASE_FREE, ledger)
        if split is not None:
            return split
    raise DecompositionError(f"Free center split at stage {stage} failed its certificates", ledger)


def _divisor_point_part(f: RatFn, g: RatFn, tower: Tower, stage: int, k: int) -> Optional[RatFn]:
    divisor = tower.divisor(stage)
    chart = tower.chart(divisor.center_chart)
    incident = divisor.incident[0]
    u_name = chart.generator(incident).linear_variable()[0]
    v_name = next(v for v in chart.vars if v != u_name)
    b = divisor.center[chart.vars.index(v_name)]
    U = MPoly.var(chart.vars, u_name)
    V = MPoly.var(chart.vars, v_name) - b
    power = k * r_multiplicity(tower, incident) + 1
    first = RatFn.const(tower.base_vars, 0)
    target = g * f
    for l in range(1, k + 1):
        local = tower.pullback(chart.id, target - first)
        if local.is_zero():
            break
        scale = U ** power * V ** (l - 1)
        try:
            restricted = (local / scale).substitute({u_name: U, v_name: b}, chart.vars)
        except SubstitutionError:
            return None
        first = first + tower.to_base(restricted * scale, chart.id)
    return first


def _divisor_point_candidates(f: RatFn, tower: Tower, stage: int, k: int, config: LabConfig) -> Iterator[RatFn]:
    yield RatFn.const(tower.base_vars, 1)
    divisor = tower.divisor(stage)
    plain = _divisor_point_part(f, RatFn.const(tower.base_vars, 1), tower, stage, k)
    H = RatFn(point_square(tower.base_vars, divisor.base_point))
    if plain is not None and not plain.is_polynomial():
        D = RatFn(plain.den)
        for n, m in ((1, 1), (1, 2), (2, 2), (2, 4)):
            yield D ** (2 * n) / (D ** (2 * n) + H ** m)
    others = [p for p in tower.base_points(stage) if p != divisor.base_point]
    if others:
        h = RatFn(clearing_polynomial(tower.base_vars, others))
        for n in range(1, config.exponent_budget + 1):
            yield h ** n


def _split_divisor_point(f: RatFn, tower: Tower, stage: int, k: int, config: LabConfig, ledger: list) -> StageSplit:
    divisor = tower.divisor(stage)
    chart_id, center = divisor.center_chart, divisor.center
    H = point_vanishing_function(tower, chart_id, center)
    m = r_multiplicity(tower, stage)
    for g in _divisor_point_candidates(f, tower, stage, k, config):
        if g != 1:
            try:
                if tower.pullback(chart_id, g).evaluate(center) == 0:
                    continue
            except PoleError:
                continue
        first = _divisor_point_part(f, g, tower, stage, k)
        if first is None:
            continue
        split = _try_candidate(f, g, first, g * f - first, H, tower, stage, k, m, config,
                               CASE_DIVISOR, ledger)
        if split is not None:
            return split
    raise DecompositionError(f"Divisor point split at stage {stage} failed its certificates", ledger)


def stage_split(f, tower: Tower, stage: int, k: int, config: LabConfig = DEFAULT_CONFIG) -> StageSplit:
    """Split f into a part regular on the stage and a part flat on the next one."""
    f = as_ratfn(f, tower.base_vars)
    if not 0 <= stage < tower.steps:
        raise DecompositionError(f"Stage {stage} has no following blowup")
    incident = tower.divisor(stage).incident
    ledger: list = []
    if len(incident) == 2:
        zero = RatFn.const(tower.base_vars, 0)
        c2 = check_relative_flatness(f, k, tower, 'strict', stage + 1)
        ledger.append(c2)
        if not c2.passed:
            raise DecompositionError(f"Crossing center at stage {stage}: remainder is not flat", ledger)
        split = StageSplit(stage, CASE_CROSSING, zero, f, certificates=[
            check_relative_flatness(zero, k, tower, 'strict', stage), c2])
    elif incident:
        split = _split_divisor_point(f, tower, stage, k, config, ledger)
    else:
        split = _split_free(f, tower, stage, k, config, ledger)
    logger.info("Stage %d split (%s): regular part %s", stage, split.case, split.regular_part)
    return split


# =============================================================================
# Driver
# =============================================================================

@dataclass
class DecompositionResult:
    f: RatFn
    k: int
    tower: Tower
    pieces: List[Tuple[int, RatFn]]
    certificates: List[FlatnessCertificate]
    regularity: List[RegularityRecord]
    splits: List[StageSplit]
    identity_check: bool

    @property
    def passed(self) -> bool:
        return (self.identity_check and all(c.passed for c in self.certificates)
                and all(r.regular for r in self.regularity))

    def as_record(self) -> Dict:
        return {
            'f': self.f,
            'k': self.k,
            'tower_steps': self.tower.steps,
            'centers': [{'chart': c, 'point': list(p)} for c, p in self.tower.centers()],
            'pieces': [
                {'stage': stage, 'piece': piece, 'certificate': f"c{index}",
                 'verdict': self.certificates[index].verdict}
                for index, (stage, piece) in enumerate(self.pieces)
            ],
            'certificates': {f"c{i}": c for i, c in enumerate(self.certificates)},
            'cases': [s.case for s in self.splits],
            'identity': self.identity_check,
        }


def decompose(f, k: int, tower: Optional[Tower] = None, config: LabConfig = DEFAULT_CONFIG) -> DecompositionResult:
    """Sum of pieces, piece i regular and relatively strict-k flat on stage i."""
    f = as_ratfn(f, tower.base_vars if tower else ('x', 'y'))
    if k < 0:
        raise DecompositionError("k must be nonnegative")
    if tower is None:
        if f.is_polynomial():
            tower = Tower.base(f.vars)
        else:
            tower = auto_resolve(f.den.squarefree_part(), budget=config.blowup_budget).tower
    elif not f.den.is_constant() and resolution_defects(tower, f.den):
        raise UnresolvedTower(f"Tower does not resolve {f.den}")

    pieces: List[Tuple[int, RatFn]] = []
    certificates: List[FlatnessCertificate] = []
    regularity: List[RegularityRecord] = []
    splits: List[StageSplit] = []
    current = f
    for stage in range(tower.steps + 1):
        record = regular_on_stage(tower, stage, current)
        if record.regular:
            certificate = check_relative_flatness(current, k, tower, 'strict', stage)
            if not certificate.passed:
                raise DecompositionError(
                    f"Remainder {current} is regular on stage {stage} but not relatively {k}-flat",
                    [certificate])
            pieces.append((stage, current))
            certificates.append(certificate)
            regularity.append(record)
            break
        if stage == tower.steps:
            raise DecompositionError(f"Remainder {current} is not regular on the resolved stage", [record])
        split = stage_split(current, tower, stage, k, config)
        pieces.append((stage, split.regular_part))
        certificates.append(split.certificates[0])
        regularity.append(split.regularity or regular_on_stage(tower, stage, split.regular_part))
        splits.append(split)
        current = split.remainder

    total = RatFn.const(f.vars, 0)
    for _, piece in pieces:
        total = total + piece
    identity = total == f
    if not identity:
        raise DecompositionError(f"Pieces sum to {total}, not {f}", certificates)
    logger.info("Decomposed %s at k=%d into %d piece(s)", f, k, len(pieces))
    return DecompositionResult(f, k, tower, pieces, certificates, regularity, splits, identity)
