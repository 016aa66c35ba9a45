"""
Flatness Service.

Ledger-based certificates for rk-flat representations q/r and for relative
flatness of a function on a tower, plus the three-valued k-regulous and
Lipschitz tests built on the decomposition engine and the arc falsifier.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from .arc_oracle import fuzz
from .blowup_tower import (
    Tower,
    auto_resolve,
    has_real_zero_outside,
    rational_curve_points,
    resolution_defects,
)
from .config import DEFAULT_CONFIG
from .divisorial import ord_or_infinity, r_multiplicity, rees_valuations
from .errors import FlatnessError, RegulousError, UnresolvedTower
from .exact_algebra import INFINITY, MPoly, RatFn, as_ratfn

logger = logging.getLogger(__name__)

REPRESENTATION = 'rk-flat-representation'
RELATIVE_STRICT = 'relatively-rk-flat'
RELATIVE_UNDERLINE = 'relatively-underline-k-flat'

CERTIFIED_YES = 'certified-yes'
CERTIFIED_NO = 'certified-no'
INCONCLUSIVE = 'inconclusive'

MODES = {'strict': RELATIVE_STRICT, 'underline': RELATIVE_UNDERLINE}


@dataclass
class LedgerRow:
    site: str
    values: Dict[str, object]
    lhs: object
    rhs: object
    strict: bool = True

    @property
    def holds(self) -> bool:
        if self.lhs is INFINITY:
            return True
        return self.lhs > self.rhs if self.strict else self.lhs >= self.rhs

    def describe(self) -> str:
        return f"{self.site}: {self.lhs} {'>' if self.strict else '>='} {self.rhs}"

    def as_record(self) -> Dict:
        return {
            'site': self.site,
            'values': self.values,
            'lhs': self.lhs,
            'rhs': self.rhs,
            'relation': '>' if self.strict else '>=',
            'holds': self.holds,
        }


@dataclass
class FlatnessCertificate:
    kind: str
    f: RatFn
    k: int
    tower_steps: int
    ledger: List[LedgerRow] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(row.holds for row in self.ledger)

    @property
    def verdict(self) -> str:
        return 'pass' if self.passed else 'fail'

    @property
    def failing_rows(self) -> List[LedgerRow]:
        return [row for row in self.ledger if not row.holds]

    def as_record(self) -> Dict:
        return {
            'kind': self.kind,
            'f': self.f,
            'k': self.k,
            'tower_steps': self.tower_steps,
            'ledger': self.ledger,
            'verdict': self.verdict,
        }


def check_rk_flat_representation(q, r, k: int, tower: Tower) -> FlatnessCertificate:
    """ord q + k*min ord dr > (k+1)*ord r at every Rees site of r."""
    q = as_ratfn(q, tower.base_vars).as_mpoly()
    r = as_ratfn(r, tower.base_vars).as_mpoly()
    if k < 0:
        raise FlatnessError("k must be nonnegative")
    if r.is_zero():
        raise FlatnessError("Zero denominator in a representation")
    if not r.is_constant() and resolution_defects(tower, r):
        raise UnresolvedTower(f"Tower does not resolve {r}")
    certificate = FlatnessCertificate(REPRESENTATION, RatFn(q) / r, k, tower.steps)
    if r.is_constant():
        return certificate
    rvals = rees_valuations(RatFn(r), tower)
    for entry in rvals.entries:
        site = entry.site
        partial_orders = [site.order(tower, r.diff(v)) for v in tower.base_vars if not r.diff(v).is_zero()]
        min_partial = min(partial_orders)
        ord_q = INFINITY if q.is_zero() else site.order(tower, q)
        lhs = INFINITY if ord_q is INFINITY else ord_q + k * min_partial
        certificate.ledger.append(LedgerRow(
            site.label,
            {'ord_q': ord_q, 'min_ord_dr': min_partial, 'ord_r': entry.ord_f},
            lhs,
            (k + 1) * entry.ord_f,
        ))
    logger.debug("Representation certificate for (%s)/(%s), k=%d: %s", q, r, k, certificate.verdict)
    return certificate


def check_relative_flatness(f, k: int, tower: Tower, mode: str = 'strict',
                            stage: Optional[int] = None) -> FlatnessCertificate:
    """ord_d(f) against k*k_d at every divisor of the stage (default: the whole tower)."""
    if mode not in MODES:
        raise FlatnessError(f"Unknown relative flatness mode '{mode}'")
    f = as_ratfn(f, tower.base_vars)
    divisors = tower.divisors if stage is None else tower.divisors_at_stage(stage)
    certificate = FlatnessCertificate(MODES[mode], f, k, len(divisors))
    for d in divisors:
        kd = r_multiplicity(tower, d.id)
        value = ord_or_infinity(tower, d.id, f)
        certificate.ledger.append(LedgerRow(
            f"d{d.id}", {'ord': value, 'k_d': kd}, value, k * kd, strict=(mode == 'strict')))
    return certificate


# =============================================================================
# Three-valued tests
# =============================================================================

@dataclass
class RegularityVerdict:
    verdict: str
    f: RatFn
    k: int
    certificate: Optional[object] = None
    witness: Optional[Dict] = None
    diagnostic: Optional[str] = None

    def as_record(self) -> Dict:
        return {
            'verdict': self.verdict,
            'f': self.f,
            'k': self.k,
            'certificate': self.certificate,
            'witness': self.witness,
            'diagnostic': self.diagnostic,
        }


def falsifier_centers(den: MPoly) -> List[tuple]:
    """Real points of Z(den) worth probing: resolution base points and rational curve points."""
    centers: List[tuple] = []
    if den.is_constant():
        return centers
    try:
        centers.extend(auto_resolve(den.squarefree_part()).tower.base_points())
    except RegulousError as exc:
        logger.warning("Falsifier centers without resolution: %s", exc)
    if len(den.vars) == 2:
        centers.extend(rational_curve_points(den.squarefree_part()))
    if not centers:
        centers.append(tuple(Fraction(0) for _ in den.vars))
    unique = []
    for c in centers:
        if c not in unique:
            unique.append(c)
    return unique


def _falsify(f: RatFn, orders: Sequence[int], config=DEFAULT_CONFIG) -> Optional[Dict]:
    for center in falsifier_centers(f.den):
        for order in orders:
            report = fuzz(f, order, center, seed=config.seed, random_arcs=config.random_arcs)
            if report.falsified:
                return dict(report.witness, center=list(center), order=order)
    return None


def k_regulous_test(f, k: int, config=DEFAULT_CONFIG) -> RegularityVerdict:
    """certified-yes via a verified decomposition, certified-no via an arc witness."""
    from .decomposition import decompose

    f = as_ratfn(f, ('x', 'y'))
    if f.is_polynomial():
        return RegularityVerdict(CERTIFIED_YES, f, k, diagnostic='polynomial')
    diagnostic = None
    try:
        result = decompose(f, k, config=config)
        logger.info("k-regulous test: %s certified at k=%d by decomposition", f, k)
        return RegularityVerdict(CERTIFIED_YES, f, k, certificate=result)
    except RegulousError as exc:
        diagnostic = str(exc)
    witness = _falsify(f, range(k + 1), config)
    if witness is not None:
        return RegularityVerdict(CERTIFIED_NO, f, k, witness=witness, diagnostic=diagnostic)
    logger.warning("k-regulous test inconclusive for %s at k=%d: %s", f, k, diagnostic)
    return RegularityVerdict(INCONCLUSIVE, f, k, diagnostic=diagnostic)


def lipschitz_test(f, config=DEFAULT_CONFIG) -> RegularityVerdict:
    """Locally Lipschitz iff both first partials are locally bounded."""
    f = as_ratfn(f, ('x', 'y'))
    if f.is_polynomial():
        return RegularityVerdict(CERTIFIED_YES, f, 1, diagnostic='polynomial')
    partials = [f.derive(v) for v in f.vars]
    diagnostic = None
    try:
        resolution = auto_resolve(f.den.squarefree_part(), budget=config.blowup_budget)
        tower = resolution.tower
        rows = []
        bounded = True
        for name, p in zip(f.vars, partials):
            if p.is_zero():
                continue
            if has_real_zero_outside(p.den, tower.base_points()):
                bounded = False
                diagnostic = f"d/d{name} has poles along a real curve"
            for d in tower.divisors:
                value = ord_or_infinity(tower, d.id, p)
                rows.append(LedgerRow(f"d{d.id}", {'partial': name}, value, 0, strict=False))
        certificate = FlatnessCertificate('bounded-partials', f, 1, tower.steps, rows)
        if bounded and certificate.passed:
            return RegularityVerdict(CERTIFIED_YES, f, 1, certificate=certificate)
        if not certificate.passed:
            diagnostic = '; '.join(r.describe() for r in certificate.failing_rows)
    except RegulousError as exc:
        diagnostic = str(exc)
    witness = _falsify(f, (1,), config)
    if witness is not None:
        return RegularityVerdict(CERTIFIED_NO, f, 1, witness=witness, diagnostic=diagnostic)
    return RegularityVerdict(INCONCLUSIVE, f, 1, diagnostic=diagnostic)

