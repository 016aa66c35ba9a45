"""
Extension Service.

Extends an rk-flat function q/r from a coordinate subspace X = Z(normal vars)
to the ambient space as F = Q R^(2N*alpha - 1) / (R^(2N*alpha) + H^N) with
H the sum of squares of the normal variables.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from .arc_oracle import TO_ZERO, SampleTable, arc_battery, arc_sample
from .blowup_tower import auto_resolve
from .config import DEFAULT_CONFIG, LabConfig
from .divisorial import rees_valuations, v_value
from .errors import ArcIndeterminate, ExtensionError, RegulousError
from .exact_algebra import INFINITY, MPoly, RatFn
from .flatness import (
    REPRESENTATION,
    FlatnessCertificate,
    LedgerRow,
    check_rk_flat_representation,
    falsifier_centers,
)

logger = logging.getLogger(__name__)


# =============================================================================
# Jet killing
# =============================================================================

def _restrict(poly: MPoly, normal: Sequence[str]) -> MPoly:
    """Set the normal variables to zero, staying on the ambient variable list."""
    mapping = {v: (0 if v in normal else MPoly.var(poly.vars, v)) for v in poly.vars}
    return poly.substitute(mapping, poly.vars)


def _normal_indices(normal: Sequence[str], order: int):
    for index in product(range(order + 1), repeat=len(normal)):
        if sum(index) == order:
            yield index


def jet_kill_extend(g: MPoly, normal: Sequence[str], M: int) -> MPoly:
    """Correct g so every pure normal derivative of order 1..M vanishes on X."""
    if M < 0:
        raise ExtensionError("M must be nonnegative")
    normal = tuple(normal)
    current = g
    for order in range(1, M + 1):
        correction = MPoly.const(g.vars, 0)
        for index in _normal_indices(normal, order):
            derivative = current
            weight = 1
            monomial = MPoly.const(g.vars, 1)
            for name, e in zip(normal, index):
                for _ in range(e):
                    derivative = derivative.diff(name)
                weight *= math.factorial(e)
                monomial = monomial * MPoly.var(g.vars, name) ** e
            if derivative.is_zero():
                continue
            correction = correction + monomial * _restrict(derivative, normal) * Fraction(1, weight)
        current = current - correction
    return current


def jet_killed(G: MPoly, normal: Sequence[str], M: int) -> bool:
    for order in range(1, M + 1):
        for index in _normal_indices(tuple(normal), order):
            derivative = G
            for name, e in zip(normal, index):
                for _ in range(e):
                    derivative = derivative.diff(name)
            if not _restrict(derivative, normal).is_zero():
                return False
    return True


# =============================================================================
# Parameters
# =============================================================================

@dataclass
class Parameters:
    v: Fraction
    k: int
    alpha: Fraction
    N: int

    @property
    def inequalities(self) -> Dict[str, bool]:
        v, k, a, N = self.v, self.k, self.alpha, self.N
        checks = {
            'alpha_below_one': 0 < a < 1,
            'N_alpha_integral': (N * a).denominator == 1,
            'N_margin': (N - 2 * k) * a > k + 1,
        }
        if k > 0:
            checks['alpha_margin'] = 0 < 2 * k * a < v - 1
        return checks

    @property
    def valid(self) -> bool:
        return all(self.inequalities.values())

    def as_record(self) -> Dict:
        return {'v': self.v, 'k': self.k, 'alpha': self.alpha, 'N': self.N,
                'inequalities': self.inequalities}


def choose_parameters(v, k: int, max_denominator: int = DEFAULT_CONFIG.alpha_denominator) -> Parameters:
    """alpha = (2/3) min(1, (v-1)/(2k)) with small denominator; N = least valid multiple."""
    if v is INFINITY:
        v = Fraction(k + 2)
    v = Fraction(v)
    if v <= 1:
        raise ExtensionError(f"v = {v} <= 1: the representation is not flat")
    if k == 0:
        alpha = Fraction(1, 2)
    else:
        exact = Fraction(2, 3) * min(Fraction(1), (v - 1) / (2 * k))
        alpha = exact.limit_denominator(max_denominator)
        if not (2 * k * alpha < v - 1 and alpha < 1):
            alpha = Fraction(math.floor(exact * max_denominator), max_denominator)
        if alpha <= 0:
            raise ExtensionError(f"No alpha with denominator <= {max_denominator} fits v = {v}, k = {k}")
    step = alpha.denominator
    N = step
    while (N - 2 * k) * alpha <= k + 1:
        N += step
    params = Parameters(v, k, alpha, N)
    if not params.valid:
        raise ExtensionError(f"Parameter selection failed: {params.inequalities}")
    logger.debug("Extension parameters v=%s k=%d: alpha=%s N=%d", v, k, alpha, N)
    return params


# =============================================================================
# Extension
# =============================================================================

@dataclass
class ExtensionResult:
    q: MPoly
    r: MPoly
    k: int
    normal: Tuple[str, ...]
    F: RatFn
    parameters: Optional[Parameters] = None
    M: int = 0
    H: Optional[MPoly] = None
    Q: Optional[MPoly] = None
    R: Optional[MPoly] = None
    Q1: Optional[MPoly] = None
    R1: Optional[MPoly] = None
    restriction_ok: bool = False
    jets_killed: bool = True
    certificate: Optional[FlatnessCertificate] = None
    oracle: List[SampleTable] = field(default_factory=list)

    @property
    def oracle_verdict(self) -> str:
        if not self.oracle:
            return 'not-run'
        return TO_ZERO if all(t.verdict == TO_ZERO for t in self.oracle) else 'not-to-zero'

    @property
    def passed(self) -> bool:
        params_ok = self.parameters is None or self.parameters.valid
        return self.restriction_ok and self.jets_killed and params_ok

    def as_record(self) -> Dict:
        return {
            'q': self.q, 'r': self.r, 'k': self.k, 'normal': list(self.normal),
            'parameters': self.parameters, 'M': self.M, 'H': self.H,
            'Q': self.Q, 'R': self.R, 'Q1': self.Q1, 'R1': self.R1, 'F': self.F,
            'restriction_ok': self.restriction_ok, 'jets_killed': self.jets_killed,
            'certificate': self.certificate,
            'oracle_verdict': self.oracle_verdict,
            'oracle': [t.as_record() for t in self.oracle if t.verdict != TO_ZERO],
        }


def _line_certificate(q: MPoly, r: MPoly, k: int) -> Tuple[FlatnessCertificate, object]:
    """Representation check on a line via orders along the real factors of r."""
    (name,) = q.vars
    certificate = FlatnessCertificate(REPRESENTATION, RatFn(q) / r, k, 0)
    ratios = []
    for factor, _ in r.univariate_factors():
        if not factor.count_real_roots():
            continue
        ord_r = r.order_along(factor)
        ord_q = INFINITY if q.is_zero() else q.order_along(factor)
        ord_dr = r.diff(name).order_along(factor)
        lhs = INFINITY if ord_q is INFINITY else ord_q + k * ord_dr
        certificate.ledger.append(LedgerRow(
            f"Z({factor.to_text()})", {'ord_q': ord_q, 'min_ord_dr': ord_dr, 'ord_r': ord_r},
            lhs, (k + 1) * ord_r))
        if ord_q is not INFINITY:
            ratios.append(Fraction(ord_q, ord_r))
    return certificate, (min(ratios) if ratios else INFINITY)


def _plane_certificate(q: MPoly, r: MPoly, k: int, config: LabConfig) -> Tuple[FlatnessCertificate, object]:
    tower = auto_resolve(r, budget=config.blowup_budget).tower
    certificate = check_rk_flat_representation(q, r, k, tower)
    v = INFINITY if q.is_zero() else v_value(rees_valuations(RatFn(r), tower), q)
    return certificate, v


def _zero_points(r: MPoly) -> List[Tuple[Fraction, ...]]:
    if len(r.vars) == 1:
        return [(root,) for root, _ in r.rational_roots()] or [(Fraction(0),)]
    return falsifier_centers(r)


def flatness_measure(Q1: MPoly, R1: MPoly, k: int) -> RatFn:
    """Square of |Q1| * |DR1|^k / |R1|^(k+1)."""
    gradient = MPoly.const(R1.vars, 0)
    for v in R1.vars:
        gradient = gradient + R1.diff(v) ** 2
    return RatFn(Q1 ** 2 * gradient ** k) / (R1 ** (2 * (k + 1)))


def extend(q, r, k: int, normal: Sequence[str], config: LabConfig = DEFAULT_CONFIG) -> ExtensionResult:
    """Ambient extension of q/r from X = Z(normal) with restriction and jet checks."""
    q = q.as_mpoly() if isinstance(q, RatFn) else q
    r = r.as_mpoly() if isinstance(r, RatFn) else r
    normal = tuple(normal)
    if not normal:
        raise ExtensionError("At least one normal variable is required")
    if set(normal) & set(q.vars):
        raise ExtensionError(f"Normal variables {normal} clash with {q.vars}")
    if r.is_zero():
        raise ExtensionError("Zero denominator")
    ambient = q.vars + normal
    q_amb, r_amb = q.with_vars(ambient), r.with_vars(ambient)

    if r.is_constant() or q.is_zero():
        F = RatFn(q_amb) / r_amb
        return ExtensionResult(q, r, k, normal, F, Q=q_amb, R=r_amb, restriction_ok=True)

    if len(q.vars) == 1:
        certificate, v = _line_certificate(q, r, k)
    elif len(q.vars) == 2:
        certificate, v = _plane_certificate(q, r, k, config)
    else:
        raise ExtensionError(f"Subspaces of dimension {len(q.vars)} are not supported")
    if not certificate.passed:
        rows = '; '.join(row.describe() for row in certificate.failing_rows)
        raise ExtensionError(f"(q, r) is not an r{k}-flat representation on X: {rows}")

    params = choose_parameters(v, k, config.alpha_denominator)
    M = math.ceil(Fraction(4 * k + 6) / params.alpha)
    Q = jet_kill_extend(q_amb, normal, M)
    R = jet_kill_extend(r_amb, normal, M)
    H = MPoly.const(ambient, 0)
    for name in normal:
        H = H + MPoly.var(ambient, name) ** 2
    twice = int(2 * params.N * params.alpha)
    Q1 = Q * R ** (twice - 1)
    R1 = R ** twice + H ** params.N
    F = RatFn(Q1, R1)

    restriction = F.substitute(
        {v: (0 if v in normal else MPoly.var(ambient, v)) for v in ambient}, ambient)
    result = ExtensionResult(
        q, r, k, normal, F, params, M, H, Q, R, Q1, R1,
        restriction_ok=(restriction == RatFn(q_amb) / r_amb),
        jets_killed=jet_killed(Q, normal, M) and jet_killed(R, normal, M),
        certificate=certificate,
    )
    measure = flatness_measure(Q1, R1, k)
    for zero in _zero_points(r):
        center = tuple(zero) + (Fraction(0),) * len(normal)
        for arc in arc_battery(center, config.seed, config.random_arcs):
            try:
                result.oracle.append(arc_sample(measure, arc))
            except (ArcIndeterminate, RegulousError):
                continue
    if not result.restriction_ok:
        raise ExtensionError(f"Restriction of {F} to X differs from {q}/{r}")
    logger.info("Extended (%s)/(%s) with alpha=%s N=%d M=%d; oracle %s",
                q, r, params.alpha, params.N, M, result.oracle_verdict)
    return result
