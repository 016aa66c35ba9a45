"""
Sum of Squares Service.

Power-flatness checks for psd polynomials, checking and pattern-based
synthesis of sums of squares of regulous functions, and the regularity
class of p^l f^m from the power rewriting of a decomposition.
"""

import logging
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .arc_oracle import FuzzReport, fuzz
from .blowup_tower import (
    SAMPLE_LINES,
    RegularityRecord,
    Tower,
    auto_resolve,
    has_real_curve,
    plane_singular_points,
    regular_on_stage,
    resolution_defects,
)
from .config import DEFAULT_CONFIG, LabConfig
from .decomposition import decompose
from .errors import NonRationalCenter, NotPsd, SosError, UnresolvedTower
from .exact_algebra import MPoly, RatFn, as_ratfn, partial
from .flatness import FlatnessCertificate, check_relative_flatness, falsifier_centers

logger = logging.getLogger(__name__)

UNSUPPORTED = 'unsupported'


def _resolving_tower(f: RatFn, config: LabConfig) -> Tower:
    poly = f.num * f.den
    if poly.is_constant():
        return Tower.base(f.vars)
    return auto_resolve(poly.squarefree_part(), budget=config.blowup_budget).tower


def _checked_tower(f: RatFn, tower: Optional[Tower], config: LabConfig) -> Tower:
    if tower is None:
        return _resolving_tower(f, config)
    poly = f.num * f.den
    if not poly.is_constant() and resolution_defects(tower, poly.squarefree_part()):
        raise UnresolvedTower(f"Tower does not resolve {f}")
    return tower


# =============================================================================
# Power flatness
# =============================================================================

@dataclass
class PowerFlatness:
    f: RatFn
    k: int
    underline: FlatnessCertificate
    strict: Optional[FlatnessCertificate]
    parity: Dict[int, bool]
    derivative_condition: Optional[bool] = None
    zeros_checked: List[tuple] = field(default_factory=list)
    undecided_zeros: Optional[str] = None

    @property
    def underline_passed(self) -> bool:
        return self.underline.passed

    @property
    def strict_passed(self) -> Optional[bool]:
        if self.strict is None:
            return None
        return bool(self.derivative_condition) and self.strict.passed

    def as_record(self) -> Dict:
        return {
            'f': self.f,
            'k': self.k,
            'underline': self.underline,
            'underline_verdict': 'pass' if self.underline_passed else 'fail',
            'strict': self.strict,
            'strict_verdict': None if self.strict is None else ('pass' if self.strict_passed else 'fail'),
            'parity': {f"d{d}": even for d, even in sorted(self.parity.items())},
            'derivative_condition': self.derivative_condition,
            'zeros_checked': [list(z) for z in self.zeros_checked],
            'undecided_zeros': self.undecided_zeros,
        }


def _rational_zeros(poly: MPoly) -> Tuple[List[tuple], Optional[str]]:
    """Rational zeros of a psd polynomial (its singular points) and a note on what was not decided."""
    zeros: List[tuple] = []
    note = None
    for factor, _ in poly.squarefree():
        if has_real_curve(factor):
            note = f"Z({factor.to_text()}) contains a real curve"
    try:
        candidates = plane_singular_points(poly.squarefree_part())
    except NonRationalCenter as exc:
        candidates = []
        note = str(exc)
    for point in candidates:
        if poly.evaluate(point) == 0:
            zeros.append(point)
    return zeros, note


def check_power_flatness(f, k: int, tower: Optional[Tower] = None, derivative_condition: bool = False,
                         config: LabConfig = DEFAULT_CONFIG) -> PowerFlatness:
    """ord_d(f) against 2k*k_d at every divisor, with parity and the 2k-th derivative condition."""
    f = as_ratfn(f, tower.base_vars if tower else ('x', 'y'))
    if k < 1:
        raise SosError("Power flatness needs k >= 1")
    tower = _checked_tower(f, tower, config)
    underline = check_relative_flatness(f, 2 * k, tower, 'underline')
    parity = {}
    for row, d in zip(underline.ledger, tower.divisors):
        value = row.values['ord']
        parity[d.id] = isinstance(value, int) and value % (2 * k) == 0
    result = PowerFlatness(f, k, underline, None, parity)
    if derivative_condition:
        result.strict = check_relative_flatness(f, 2 * k, tower, 'strict')
        zeros, note = ([], None) if not f.is_polynomial() else _rational_zeros(f.as_mpoly())
        result.zeros_checked = zeros
        result.undecided_zeros = note
        holds = True
        for point in zeros:
            for counts in _multi_counts(len(f.vars), 2 * k):
                if partial(f, dict(zip(f.vars, counts))).evaluate(point) != 0:
                    holds = False
        result.derivative_condition = holds
        if note:
            logger.warning("Derivative condition for %s only checked at rational zeros: %s", f, note)
    logger.debug("Power flatness of %s at k=%d: underline %s", f, k, result.underline_passed)
    return result


def _multi_counts(count: int, order: int):
    if count == 1:
        yield (order,)
        return
    for first in range(order + 1):
        for rest in _multi_counts(count - 1, order - first):
            yield (first,) + rest


# =============================================================================
# Checking
# =============================================================================

@dataclass
class SosCertificate:
    f: RatFn
    k: int
    mode: str
    squares: List[RatFn]
    residual: RatFn
    certificates: List[FlatnessCertificate] = field(default_factory=list)

    @property
    def identity_holds(self) -> bool:
        return self.residual.is_zero()

    @property
    def passed(self) -> bool:
        return self.identity_holds and all(c.passed for c in self.certificates)

    @property
    def verdict(self) -> str:
        return 'pass' if self.passed else 'fail'

    def as_record(self) -> Dict:
        return {
            'f': self.f,
            'k': self.k,
            'mode': self.mode,
            'squares': self.squares,
            'identity': self.identity_holds,
            'residual': self.residual,
            'certificates': self.certificates,
            'verdict': self.verdict,
        }


def check_sos(f, squares: Sequence, k: int, tower: Optional[Tower] = None, mode: str = 'underline',
              config: LabConfig = DEFAULT_CONFIG) -> SosCertificate:
    """Exact identity f = sum of squares plus relative flatness of every square."""
    f = as_ratfn(f, tower.base_vars if tower else ('x', 'y'))
    squares = [as_ratfn(s, f.vars) for s in squares]
    total = RatFn.const(f.vars, 0)
    for s in squares:
        total = total + s * s
    residual = f - total
    if f.is_zero() and not squares:
        return SosCertificate(f, k, mode, squares, residual)
    tower = _checked_tower(f, tower, config)
    certificates = [check_relative_flatness(s, k, tower, mode) for s in squares]
    certificate = SosCertificate(f, k, mode, squares, residual, certificates)
    if not certificate.identity_holds:
        logger.info("Sum of squares identity for %s fails with residual %s", f, residual)
    return certificate


# =============================================================================
# Synthesis
# =============================================================================

def four_squares(n: int) -> Tuple[int, int, int, int]:
    """n = a^2 + b^2 + c^2 + d^2 with a >= b >= c >= d >= 0."""
    if n < 0:
        raise SosError(f"{n} is negative")
    for a in range(math.isqrt(n), -1, -1):
        r1 = n - a * a
        for b in range(min(a, math.isqrt(r1)), -1, -1):
            r2 = r1 - b * b
            for c in range(min(b, math.isqrt(r2)), -1, -1):
                r3 = r2 - c * c
                d = math.isqrt(r3)
                if d * d == r3 and d <= c:
                    return a, b, c, d
    raise SosError(f"No four-square split of {n}")


def rational_square_split(value: Fraction) -> List[Fraction]:
    """Rationals whose squares sum to a positive rational (at most four)."""
    value = Fraction(value)
    if value <= 0:
        raise SosError(f"{value} is not positive")
    num_root, den_root = math.isqrt(value.numerator), math.isqrt(value.denominator)
    if num_root ** 2 == value.numerator and den_root ** 2 == value.denominator:
        return [Fraction(num_root, den_root)]
    parts = four_squares(value.numerator * value.denominator)
    return [Fraction(p, value.denominator) for p in parts if p]


def _even_monomial_squares(poly: MPoly) -> Optional[List[MPoly]]:
    squares = []
    for exp, coeff in poly.sorted_terms():
        if coeff <= 0 or any(e % 2 for e in exp):
            return None
        root = MPoly.from_terms(poly.vars, {tuple(e // 2 for e in exp): 1})
        squares.extend(root * r for r in rational_square_split(coeff))
    return squares


def _quadratic_squares(poly: MPoly) -> Optional[List[MPoly]]:
    """LDL^T of the Gram matrix of a degree <= 2 polynomial on the basis (vars..., 1)."""
    if poly.degree() > 2:
        return None
    names = poly.used_vars()
    basis = [MPoly.var(poly.vars, v) for v in names] + [MPoly.const(poly.vars, 1)]
    size = len(basis)
    exps = [tuple(1 if w == v else 0 for w in poly.vars) for v in names] + [tuple(0 for _ in poly.vars)]
    terms = poly.terms
    gram = [[Fraction(0)] * size for _ in range(size)]
    for i in range(size):
        for j in range(size):
            product = tuple(a + b for a, b in zip(exps[i], exps[j]))
            coeff = terms.get(product, Fraction(0))
            gram[i][j] = coeff if i == j else coeff / 2
    lower = [[Fraction(int(i == j)) for j in range(size)] for i in range(size)]
    diagonal = [Fraction(0)] * size
    for j in range(size):
        diagonal[j] = gram[j][j] - sum(lower[j][p] ** 2 * diagonal[p] for p in range(j))
        for i in range(j + 1, size):
            entry = gram[i][j] - sum(lower[i][p] * lower[j][p] * diagonal[p] for p in range(j))
            if diagonal[j] == 0:
                if entry != 0:
                    return None
                continue
            lower[i][j] = entry / diagonal[j]
    if any(d < 0 for d in diagonal):
        return None
    squares = []
    for j in range(size):
        if diagonal[j] == 0:
            continue
        form = MPoly.const(poly.vars, 0)
        for i in range(j, size):
            form = form + basis[i] * lower[i][j]
        squares.extend(form * r for r in rational_square_split(diagonal[j]))
    return squares


def _residual_squares(residual: MPoly) -> Optional[List[MPoly]]:
    if residual.is_constant():
        value = residual.constant_value()
        return [MPoly.const(residual.vars, r) for r in rational_square_split(value)] if value > 0 else None
    return _even_monomial_squares(residual) or _quadratic_squares(residual)


def _psd_sample_points(dim: int, seed: int, count: int = 40) -> List[tuple]:
    points = []
    if dim == 2:
        points.extend((a, b) for a in SAMPLE_LINES for b in SAMPLE_LINES)
    else:
        points.extend(tuple(c for _ in range(dim)) for c in SAMPLE_LINES)
    rng = random.Random(seed)
    for _ in range(count):
        points.append(tuple(Fraction(rng.randint(-20, 20), rng.randint(1, 7)) for _ in range(dim)))
    return points


def assert_psd_on_samples(poly: MPoly, seed: int = DEFAULT_CONFIG.seed):
    for point in _psd_sample_points(len(poly.vars), seed):
        if poly.evaluate(point) < 0:
            raise NotPsd(f"{poly} is negative at {tuple(str(c) for c in point)}", point)


@dataclass
class SosSynthesis:
    f: RatFn
    squares: Optional[List[RatFn]]
    blocking: Optional[MPoly] = None
    certificate: Optional[SosCertificate] = None

    @property
    def supported(self) -> bool:
        return self.squares is not None

    def as_record(self) -> Dict:
        return {
            'f': self.f,
            'verdict': 'synthesized' if self.supported else UNSUPPORTED,
            'squares': self.squares,
            'blocking_residual': self.blocking,
            'certificate': self.certificate,
        }


def synth_sos_snc(f, tower: Optional[Tower] = None, config: LabConfig = DEFAULT_CONFIG) -> SosSynthesis:
    """Squares (even part root) x (residual pattern), checked at the underline-1 level."""
    f = as_ratfn(f, tower.base_vars if tower else ('x', 'y'))
    if not f.is_polynomial():
        raise SosError(f"Synthesis works on polynomials, got {f}")
    poly = f.as_mpoly()
    assert_psd_on_samples(poly, config.seed)
    if poly.is_zero():
        return SosSynthesis(f, [])
    root = MPoly.const(poly.vars, 1)
    for factor, multiplicity in poly.squarefree():
        root = root * factor ** (multiplicity // 2)
    residual = poly.exquo(root * root)
    pattern = _residual_squares(residual)
    if pattern is None:
        logger.info("No square pattern for residual %s of %s", residual, f)
        return SosSynthesis(f, None, residual)
    squares = [RatFn(root * s) for s in pattern]
    certificate = check_sos(f, squares, 1, tower, 'underline', config)
    if not certificate.identity_holds:
        raise SosError(f"Synthesized squares leave residual {certificate.residual}")
    return SosSynthesis(f, squares, None, certificate)


# =============================================================================
# Power rewriting and the regularity class of p^l f^m
# =============================================================================

@dataclass(frozen=True)
class PowerTerm:
    """coefficient * b * a_i^(l+1-alpha) * (a_{i+1} + ... + a_n)^alpha, b a monomial in a_1..a_i."""

    coefficient: int
    b: Tuple[int, ...]
    index: int
    alpha: int

    def describe(self, l: int) -> str:
        factors = [f"a{j + 1}^{e}" for j, e in enumerate(self.b) if e]
        factors.append(f"a{self.index}^{l + 1 - self.alpha}")
        if self.alpha:
            factors.append(f"(a{self.index + 1}+...)^{self.alpha}")
        return f"{self.coefficient}*" + '*'.join(factors)


def rewrite_power_form(n: int, m: int, l: int) -> List[PowerTerm]:
    """(a_1+...+a_n)^m as integer combination of PowerTerms, expanding in the first variable."""
    if n < 1:
        raise SosError("n must be positive")
    if not m > l >= 0:
        raise SosError(f"Need m > l >= 0, got m={m}, l={l}")
    return _rewrite(n, m, l, 1)


def _rewrite(n: int, m: int, l: int, first: int) -> List[PowerTerm]:
    terms: List[PowerTerm] = []
    width = n - first + 1
    top = m if width > 1 else 0
    for alpha in range(top + 1):
        coefficient = math.comb(m, alpha)
        if alpha <= l:
            b = [0] * n
            b[first - 1] = m - l - 1
            terms.append(PowerTerm(coefficient, tuple(b), first, alpha))
            continue
        for inner in _rewrite(n, alpha, l, first + 1):
            b = list(inner.b)
            b[first - 1] += m - alpha
            terms.append(PowerTerm(coefficient * inner.coefficient, tuple(b), inner.index, inner.alpha))
    return terms


def expand_power_terms(terms: Sequence[PowerTerm], n: int, l: int) -> MPoly:
    names = tuple(f"a{i}" for i in range(1, n + 1))
    a = MPoly.gens(names)
    total = MPoly.const(names, 0)
    for term in terms:
        value = MPoly.const(names, term.coefficient)
        for j, e in enumerate(term.b):
            value = value * a[j] ** e
        value = value * a[term.index - 1] ** (l + 1 - term.alpha)
        tail = MPoly.const(names, 0)
        for j in range(term.index, n):
            tail = tail + a[j]
        total = total + value * tail ** term.alpha
    return total


def power_form_holds(n: int, m: int, l: int) -> bool:
    names = tuple(f"a{i}" for i in range(1, n + 1))
    full = MPoly.const(names, 0)
    for g in MPoly.gens(names):
        full = full + g
    return expand_power_terms(rewrite_power_form(n, m, l), n, l) == full ** m


def regularity_class(k: int, l: int) -> int:
    return k * l + k + 2 * l


@dataclass
class TermCheck:
    term: str
    stage: int
    value: RatFn
    certificate: FlatnessCertificate
    regularity: RegularityRecord

    @property
    def passed(self) -> bool:
        return self.certificate.passed and self.regularity.regular

    def as_record(self) -> Dict:
        return {
            'term': self.term,
            'stage': self.stage,
            'value': self.value,
            'certificate': self.certificate,
            'regular': self.regularity.regular,
            'verdict': 'pass' if self.passed else 'fail',
        }


@dataclass
class TheoremBRecord:
    p: MPoly
    q: MPoly
    k: int
    l: int
    m: int
    regularity_class: int
    shifted_m: int
    denominator_flatness: Optional[FlatnessCertificate] = None
    pieces: List[Tuple[int, RatFn]] = field(default_factory=list)
    terms: List[TermCheck] = field(default_factory=list)
    rewrite_identity: bool = True
    term_identity: bool = True
    falsifier: List[FuzzReport] = field(default_factory=list)
    note: Optional[str] = None

    @property
    def falsified(self) -> bool:
        return any(report.falsified for report in self.falsifier)

    @property
    def passed(self) -> bool:
        return (self.rewrite_identity and self.term_identity
                and all(t.passed for t in self.terms) and not self.falsified)

    def as_record(self) -> Dict:
        return {
            'p': self.p, 'q': self.q, 'k': self.k, 'l': self.l, 'm': self.m,
            'class': self.regularity_class,
            'shifted_m': self.shifted_m,
            'denominator_flatness': self.denominator_flatness,
            'pieces': [{'stage': s, 'piece': piece} for s, piece in self.pieces],
            'terms': self.terms,
            'rewrite_identity': self.rewrite_identity,
            'term_identity': self.term_identity,
            'falsifier': [r.as_record() for r in self.falsifier],
            'note': self.note,
            'verdict': 'pass' if self.passed else 'fail',
        }


def theorem_b(p: MPoly, q: MPoly, k: int, l: int, m: int, config: LabConfig = DEFAULT_CONFIG) -> TheoremBRecord:
    """Check p^l f^m in class kl + k + 2l for f = p/q by term-wise flatness and the falsifier."""
    if min(k, l, m) < 0:
        raise SosError("k, l and m must be nonnegative")
    if q.is_zero():
        raise SosError("Zero denominator")
    f = RatFn(p) / q
    shifted = m + l
    record = TheoremBRecord(p, q, k, l, m, regularity_class(k, l), shifted)
    if shifted <= l:
        record.note = 'p^l f^m = p^l is a polynomial'
        return record

    result = decompose(f, k, config=config)
    tower = result.tower
    record.pieces = list(result.pieces)
    if not q.is_constant():
        record.denominator_flatness = check_relative_flatness(q, 2, tower, 'underline')

    n = len(result.pieces)
    values = [piece for _, piece in result.pieces]
    terms = rewrite_power_form(n, shifted, l)
    record.rewrite_identity = power_form_holds(n, shifted, l)
    q_fn = RatFn(q)
    total = RatFn.const(f.vars, 0)
    for term in terms:
        i = term.index - 1
        tail = RatFn.const(f.vars, 0)
        for later in values[i + 1:]:
            tail = tail + later
        value = q_fn ** (l - term.alpha) * values[i] ** (l + 1 - term.alpha) * (q_fn * tail) ** term.alpha
        for j, e in enumerate(term.b):
            value = value * values[j] ** e
        total = total + value * term.coefficient
        stage = result.pieces[i][0]
        record.terms.append(TermCheck(
            term.describe(l), stage, value,
            check_relative_flatness(value, record.regularity_class, tower, 'strict', stage),
            regular_on_stage(tower, stage, value),
        ))
    record.term_identity = total == q_fn ** l * f ** shifted

    target = RatFn(p) ** l * f ** m
    for center in falsifier_centers(f.den):
        record.falsifier.append(fuzz(target, record.regularity_class, center,
                                     seed=config.seed, random_arcs=config.random_arcs))
    logger.info("Class %d check for p^%d f^%d with f=%s: %s",
                record.regularity_class, l, m, f, 'pass' if record.passed else 'fail')
    return record
