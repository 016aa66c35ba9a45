"""
Exact Polynomial Arithmetic Service.

MPoly wraps a sympy sparse polynomial over QQ in graded lexicographic order
on a fixed, named variable list. RatFn is a reduced quotient of two MPolys
on the same list: gcd removed, denominator a primitive integer polynomial
with positive leading coefficient. Coefficients cross the API as
``fractions.Fraction``.
"""

import logging
from fractions import Fraction
from functools import lru_cache
from math import gcd as igcd
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import sympy
from sympy.polys.domains import QQ
from sympy.polys.orderings import grlex
from sympy.polys.polyerrors import ExactQuotientFailed
from sympy.polys.rings import PolyElement, PolyRing

from .errors import (
    AlgebraError,
    PoleError,
    SubstitutionError,
    UnknownVariable,
    VariableMismatch,
    ZeroFunctionError,
)

logger = logging.getLogger(__name__)

Rat = Fraction
Exponent = Tuple[int, ...]


class _Infinity:
    """Order of the zero function; compares above every number."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return 'INFINITY'

    def __str__(self):
        return 'inf'

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash('regulous-infinity')

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True


INFINITY = _Infinity()


def to_rat(value) -> Fraction:
    """Convert an int, Fraction or QQ element to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    try:
        return Fraction(int(value.numerator), int(value.denominator))
    except AttributeError as exc:
        raise AlgebraError(f"Not an exact rational: {value!r}") from exc


def _qq(value):
    r = to_rat(value)
    return QQ(r.numerator, r.denominator)


@lru_cache(maxsize=None)
def poly_ring(variables: Tuple[str, ...]) -> PolyRing:
    return PolyRing(list(variables), QQ, grlex)


def _is_scalar(value) -> bool:
    return isinstance(value, (int, Fraction)) and not isinstance(value, bool)


# =============================================================================
# Polynomials
# =============================================================================

class MPoly:
    """Sparse polynomial with rational coefficients over named variables."""

    __slots__ = ('vars', '_element')

    def __init__(self, variables: Sequence[str], element: Optional[PolyElement] = None):
        self.vars = tuple(variables)
        if len(set(self.vars)) != len(self.vars) or not self.vars:
            raise AlgebraError(f"Invalid variable list: {self.vars}")
        ring = poly_ring(self.vars)
        if element is None:
            element = ring.zero
        elif element.ring != ring:
            element = ring.from_dict(dict(element.items()))
        self._element = element

    # -- constructors ---------------------------------------------------------

    @classmethod
    def from_terms(cls, variables: Sequence[str], terms: Mapping[Exponent, object]) -> 'MPoly':
        variables = tuple(variables)
        ring = poly_ring(variables)
        data = {}
        for exponent, coefficient in terms.items():
            if len(exponent) != len(variables):
                raise AlgebraError(f"Exponent {exponent} does not match variables {variables}")
            c = to_rat(coefficient)
            if c:
                data[tuple(exponent)] = _qq(c)
        return cls(variables, ring.from_dict(data) if data else ring.zero)

    @classmethod
    def const(cls, variables: Sequence[str], value) -> 'MPoly':
        variables = tuple(variables)
        return cls(variables, poly_ring(variables).ground_new(_qq(value)))

    @classmethod
    def var(cls, variables: Sequence[str], name: str) -> 'MPoly':
        variables = tuple(variables)
        if name not in variables:
            raise UnknownVariable(f"Unknown variable '{name}' for {variables}")
        return cls(variables, poly_ring(variables).gens[variables.index(name)])

    @classmethod
    def gens(cls, variables: Sequence[str]) -> Tuple['MPoly', ...]:
        return tuple(cls.var(variables, name) for name in variables)

    # -- inspection -----------------------------------------------------------

    @property
    def element(self) -> PolyElement:
        return self._element

    @property
    def terms(self) -> Dict[Exponent, Fraction]:
        return {exp: to_rat(c) for exp, c in self._element.items()}

    def sorted_terms(self) -> List[Tuple[Exponent, Fraction]]:
        """Terms in descending graded-lex order."""
        if not self._element:
            return []
        return [(exp, to_rat(c)) for exp, c in self._element.terms()]

    def is_zero(self) -> bool:
        return not self._element

    def is_constant(self) -> bool:
        return all(not any(exp) for exp in self._element.keys())

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise AlgebraError(f"{self} is not constant")
        return to_rat(self._element.get((0,) * len(self.vars), 0))

    def leading_coefficient(self) -> Fraction:
        return to_rat(self._element.LC) if self._element else Fraction(0)

    def degree(self) -> int:
        if not self._element:
            return -1
        return max(sum(exp) for exp in self._element.keys())

    def degree_in(self, name: str) -> int:
        idx = self._index(name)
        if not self._element:
            return -1
        return max(exp[idx] for exp in self._element.keys())

    def used_vars(self) -> Tuple[str, ...]:
        used = set()
        for exp in self._element.keys():
            used.update(v for v, e in zip(self.vars, exp) if e)
        return tuple(v for v in self.vars if v in used)

    def _index(self, name: str) -> int:
        try:
            return self.vars.index(name)
        except ValueError:
            raise UnknownVariable(f"Unknown variable '{name}' for {self.vars}") from None

    # -- arithmetic -----------------------------------------------------------

    def _coerce(self, other) -> Optional[PolyElement]:
        if isinstance(other, MPoly):
            if other.vars != self.vars:
                raise VariableMismatch(f"{self.vars} vs {other.vars}")
            return other._element
        if _is_scalar(other):
            return self._element.ring.ground_new(_qq(other))
        return None

    def __add__(self, other):
        if isinstance(other, RatFn):
            return RatFn(self) + other
        e = self._coerce(other)
        return NotImplemented if e is None else MPoly(self.vars, self._element + e)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, RatFn):
            return RatFn(self) - other
        e = self._coerce(other)
        return NotImplemented if e is None else MPoly(self.vars, self._element - e)

    def __rsub__(self, other):
        e = self._coerce(other)
        return NotImplemented if e is None else MPoly(self.vars, e - self._element)

    def __neg__(self):
        return MPoly(self.vars, -self._element)

    def __mul__(self, other):
        if isinstance(other, RatFn):
            return RatFn(self) * other
        e = self._coerce(other)
        return NotImplemented if e is None else MPoly(self.vars, self._element * e)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if _is_scalar(other):
            if not other:
                raise ZeroDivisionError("division of a polynomial by zero")
            return self * (1 / Fraction(other))
        if isinstance(other, (MPoly, RatFn)):
            return RatFn(self) / other
        return NotImplemented

    def __rtruediv__(self, other):
        if _is_scalar(other):
            return RatFn(MPoly.const(self.vars, other), self)
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise AlgebraError(f"Polynomial power must be a nonnegative integer, got {n}")
        return MPoly(self.vars, self._element ** n)

    def __eq__(self, other):
        if isinstance(other, MPoly):
            return self.vars == other.vars and self._element == other._element
        if _is_scalar(other):
            return self.is_constant() and self.constant_value() == other
        if isinstance(other, RatFn):
            return other == self
        return NotImplemented

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self._element)

    def __repr__(self):
        return f"MPoly({self.to_text()!r}, vars={self.vars})"

    def __str__(self):
        return self.to_text()

    # -- exact division and gcd -----------------------------------------------

    def exquo(self, other: 'MPoly') -> 'MPoly':
        """Exact quotient; raises AlgebraError when ``other`` does not divide."""
        e = self._coerce(other)
        try:
            return MPoly(self.vars, self._element.exquo(e))
        except (ExactQuotientFailed, ZeroDivisionError) as exc:
            raise AlgebraError(f"{other} does not divide {self}") from exc

    def divides(self, other: 'MPoly') -> bool:
        if self.is_zero():
            return other.is_zero()
        _, remainder = other._element.div(self._coerce(self))
        return not remainder

    def gcd(self, other: 'MPoly') -> 'MPoly':
        return MPoly(self.vars, self._element.gcd(self._coerce(other)))

    def primitive(self) -> Tuple[Fraction, 'MPoly']:
        """Return (c, P) with self = c*P, P integer primitive with positive leading coefficient."""
        if self.is_zero():
            return Fraction(0), self
        coefficients = list(self.terms.values())
        den = 1
        for c in coefficients:
            den = den * c.denominator // igcd(den, c.denominator)
        num = 0
        for c in coefficients:
            num = igcd(num, (c * den).numerator)
        content = Fraction(num, den)
        if self.leading_coefficient() < 0:
            content = -content
        return content, self * (1 / content)

    def primitive_part(self) -> 'MPoly':
        return self.primitive()[1]

    # -- calculus and evaluation ----------------------------------------------

    def diff(self, name: str) -> 'MPoly':
        idx = self._index(name)
        return MPoly(self.vars, self._element.diff(self._element.ring.gens[idx]))

    def evaluate(self, point: Sequence) -> Fraction:
        if len(point) != len(self.vars):
            raise AlgebraError(f"Point of length {len(point)} for variables {self.vars}")
        values = [to_rat(v) for v in point]
        total = Fraction(0)
        for exp, c in self._element.items():
            term = to_rat(c)
            for value, e in zip(values, exp):
                if e:
                    term *= value ** e
            total += term
        return total

    def substitute(self, mapping: Mapping[str, object],
                   variables: Optional[Sequence[str]] = None) -> 'MPoly':
        """Compose with ``mapping`` (var -> MPoly or scalar); every used variable must be mapped."""
        images = []
        target = tuple(variables) if variables is not None else None
        for name in self.vars:
            if name not in mapping:
                if any(exp[self.vars.index(name)] for exp in self._element.keys()):
                    raise UnknownVariable(f"Substitution does not cover '{name}'")
                images.append(None)
                continue
            image = mapping[name]
            if isinstance(image, MPoly):
                if target is None:
                    target = image.vars
                elif image.vars != target:
                    raise VariableMismatch(f"Substitution images mix {target} and {image.vars}")
            images.append(image)
        if target is None:
            raise AlgebraError("Substitution needs a target variable list")
        ring = poly_ring(target)
        lifted = []
        for image in images:
            if image is None or isinstance(image, MPoly):
                lifted.append(None if image is None else image._element)
            else:
                lifted.append(ring.ground_new(_qq(image)))
        powers: List[Dict[int, PolyElement]] = [{0: ring.one} for _ in lifted]

        def power(i: int, e: int) -> PolyElement:
            cache = powers[i]
            if e not in cache:
                top = max(k for k in cache if k < e)
                value = cache[top]
                for k in range(top + 1, e + 1):
                    value = value * lifted[i]
                    cache[k] = value
            return cache[e]

        result = ring.zero
        for exp, c in self._element.items():
            term = ring.ground_new(c)
            for i, e in enumerate(exp):
                if e:
                    term = term * power(i, e)
            result += term
        return MPoly(target, result)

    def specialize(self, values: Mapping[str, object]) -> 'MPoly':
        """Fix some variables to rationals; the result lives on the remaining variables."""
        remaining = tuple(v for v in self.vars if v not in values)
        if not remaining:
            raise AlgebraError("specialize would remove every variable; use evaluate")
        mapping = {v: MPoly.var(remaining, v) for v in remaining}
        mapping.update({v: to_rat(values[v]) for v in values if v in self.vars})
        return self.substitute(mapping, remaining)

    def with_vars(self, variables: Sequence[str]) -> 'MPoly':
        """Re-express on another variable list containing every used variable."""
        variables = tuple(variables)
        if variables == self.vars:
            return self
        positions = []
        for name in self.vars:
            positions.append(variables.index(name) if name in variables else None)
        data = {}
        for exp, c in self._element.items():
            new = [0] * len(variables)
            for e, pos in zip(exp, positions):
                if e:
                    if pos is None:
                        raise VariableMismatch(f"{self} uses a variable outside {variables}")
                    new[pos] = e
            data[tuple(new)] = c
        ring = poly_ring(variables)
        return MPoly(variables, ring.from_dict(data) if data else ring.zero)

    # -- orders ---------------------------------------------------------------

    def uadic_order(self, name: str) -> int:
        if self.is_zero():
            raise ZeroFunctionError("The zero polynomial has infinite order")
        idx = self._index(name)
        return min(exp[idx] for exp in self._element.keys())

    def linear_variable(self) -> Optional[Tuple[str, Fraction]]:
        """If self = c*(v - a) for a variable v, return (v, a)."""
        if self.degree() != 1:
            return None
        used = self.used_vars()
        if len(used) != 1:
            return None
        name = used[0]
        idx = self.vars.index(name)
        terms = self.terms
        slope = terms[tuple(1 if i == idx else 0 for i in range(len(self.vars)))]
        offset = terms.get((0,) * len(self.vars), Fraction(0))
        return name, -offset / slope

    def order_along(self, generator: 'MPoly') -> int:
        """Largest n with generator**n dividing self."""
        if self.is_zero():
            raise ZeroFunctionError("The zero polynomial has infinite order")
        if generator.is_constant():
            raise AlgebraError("Order along a constant is undefined")
        linear = generator.linear_variable()
        if linear is not None and linear[1] == 0:
            return self.uadic_order(linear[0])
        n, current = 0, self._element
        g = self._coerce(generator)
        while True:
            quotient, remainder = current.div(g)
            if remainder:
                return n
            current, n = quotient, n + 1

    # -- factor structure -----------------------------------------------------

    def squarefree(self) -> List[Tuple['MPoly', int]]:
        """Squarefree decomposition; factors primitive, pairwise coprime, sorted by multiplicity."""
        if self.is_zero():
            raise ZeroFunctionError("squarefree of the zero polynomial")
        _, factors = self._element.sqf_list()
        result = []
        for factor, multiplicity in factors:
            poly = MPoly(self.vars, factor)
            if not poly.is_constant():
                result.append((poly.primitive_part(), multiplicity))
        result.sort(key=lambda item: (item[1], item[0].degree(), item[0].to_text()))
        return result

    def squarefree_part(self) -> 'MPoly':
        result = MPoly.const(self.vars, 1)
        for factor, _ in self.squarefree():
            result = result * factor
        return result

    def resultant(self, other: 'MPoly', name: str) -> 'MPoly':
        """Resultant eliminating ``name``; lives on the remaining variables."""
        others = tuple(v for v in self.vars if v != name)
        if not others:
            raise AlgebraError("resultant needs at least two variables")
        order = (name,) + others
        value = self.with_vars(order)._element.resultant(other.with_vars(order)._element)
        if isinstance(value, PolyElement):
            return MPoly.from_terms(others, dict(value.items()))
        return MPoly.const(others, to_rat(value))

    def univariate_factors(self) -> List[Tuple['MPoly', int]]:
        """Irreducible factors over QQ of a polynomial in at most one used variable."""
        if len(self.used_vars()) > 1:
            raise AlgebraError(f"{self} is not univariate")
        if self.is_constant():
            return []
        _, factors = self._element.factor_list()
        return [(MPoly(self.vars, f).primitive_part(), k) for f, k in factors
                if not MPoly(self.vars, f).is_constant()]

    def irreducible_factors(self) -> List['MPoly']:
        """Distinct irreducible factors over QQ, primitive."""
        if self.is_zero():
            raise ZeroFunctionError("factors of the zero polynomial")
        _, factors = self._element.factor_list()
        result = [MPoly(self.vars, f).primitive_part() for f, _ in factors]
        result = [f for f in result if not f.is_constant()]
        result.sort(key=lambda f: (f.degree(), f.to_text()))
        return result

    def leading_coefficient_in(self, name: str) -> 'MPoly':
        """Coefficient of the highest power of ``name``, on the same variables."""
        idx = self._index(name)
        top = self.degree_in(name)
        data = {}
        for exp, c in self._element.items():
            if exp[idx] == top:
                data[exp[:idx] + (0,) + exp[idx + 1:]] = c
        ring = self._element.ring
        return MPoly(self.vars, ring.from_dict(data) if data else ring.zero)

    def separating_points(self) -> List[Fraction]:
        """One rational in each open interval of the line minus the real roots."""
        used = self.used_vars()
        if len(used) > 1:
            raise AlgebraError(f"{self} is not univariate")
        if not used:
            return [Fraction(0)]
        symbol = self._element.ring.symbols[self.vars.index(used[0])]
        poly = sympy.Poly(self._element.as_expr(), symbol)
        intervals = [(Fraction(str(a)), Fraction(str(b))) for (a, b), _ in poly.intervals()]
        if not intervals:
            return [Fraction(0)]
        eps = Fraction(1, 2)
        while any(intervals[i][1] >= intervals[i + 1][0] for i in range(len(intervals) - 1)):
            eps /= 4
            intervals = [(Fraction(str(a)), Fraction(str(b)))
                         for (a, b), _ in poly.intervals(eps=sympy.Rational(eps.numerator, eps.denominator))]
        points = [Fraction(int(intervals[0][0]) - 1)]
        for (_, right), (left, _) in zip(intervals, intervals[1:]):
            points.append((right + left) / 2)
        points.append(Fraction(int(intervals[-1][1]) + 1))
        return points

    def rational_roots(self) -> List[Tuple[Fraction, int]]:
        roots = []
        for factor, multiplicity in self.univariate_factors():
            if factor.degree() == 1:
                roots.append((factor.linear_variable()[1], multiplicity))
        return sorted(roots)

    def count_real_roots(self) -> int:
        """Number of distinct real roots of a univariate polynomial."""
        used = self.used_vars()
        if len(used) > 1:
            raise AlgebraError(f"{self} is not univariate")
        if not used:
            return 0
        symbol = self._element.ring.symbols[self.vars.index(used[0])]
        return int(sympy.Poly(self._element.as_expr(), symbol).count_roots())

    # -- text -----------------------------------------------------------------

    def _monomial_text(self, exp: Exponent) -> str:
        return '*'.join(v if e == 1 else f"{v}^{e}" for v, e in zip(self.vars, exp) if e)

    def to_text(self) -> str:
        if self.is_zero():
            return '0'
        pieces = []
        for exp, c in self.sorted_terms():
            monomial = self._monomial_text(exp)
            size = abs(c)
            if not monomial:
                body = str(size)
            elif size == 1:
                body = monomial
            else:
                body = f"{size}*{monomial}"
            if not pieces:
                pieces.append(f"-{body}" if c < 0 else body)
            else:
                pieces.append(f"{'-' if c < 0 else '+'}{body}")
        return ''.join(pieces)

    def is_monomial(self) -> bool:
        return len(self._element) == 1


# =============================================================================
# Rational functions
# =============================================================================

class RatFn:
    """Reduced quotient num/den of polynomials on one variable list."""

    __slots__ = ('num', 'den')

    def __init__(self, num, den=None, *, reduced: bool = False):
        if den is None:
            if isinstance(num, RatFn):
                self.num, self.den = num.num, num.den
                return
            den = MPoly.const(num.vars, 1)
        if num.vars != den.vars:
            raise VariableMismatch(f"{num.vars} vs {den.vars}")
        if den.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if not reduced:
            num, den = self._reduce(num, den)
        self.num = num
        self.den = den

    @staticmethod
    def _reduce(num: MPoly, den: MPoly) -> Tuple[MPoly, MPoly]:
        if num.is_zero():
            return num, MPoly.const(num.vars, 1)
        if not den.is_constant():
            common = num.gcd(den)
            if not common.is_constant():
                num, den = num.exquo(common), den.exquo(common)
        content, den = den.primitive()
        return num * (1 / content), den

    @classmethod
    def const(cls, variables: Sequence[str], value) -> 'RatFn':
        return cls(MPoly.const(variables, value))

    @classmethod
    def var(cls, variables: Sequence[str], name: str) -> 'RatFn':
        return cls(MPoly.var(variables, name))

    @property
    def vars(self) -> Tuple[str, ...]:
        return self.num.vars

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def is_constant(self) -> bool:
        return self.is_polynomial() and self.num.is_constant()

    def as_mpoly(self) -> MPoly:
        if not self.is_polynomial():
            raise AlgebraError(f"{self} is not a polynomial")
        return self.num * (1 / self.den.constant_value())

    # -- arithmetic -----------------------------------------------------------

    def _lift(self, other) -> Optional['RatFn']:
        if isinstance(other, RatFn):
            if other.vars != self.vars:
                raise VariableMismatch(f"{self.vars} vs {other.vars}")
            return other
        if isinstance(other, MPoly):
            if other.vars != self.vars:
                raise VariableMismatch(f"{self.vars} vs {other.vars}")
            return RatFn(other)
        if _is_scalar(other):
            return RatFn.const(self.vars, other)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        if self.den == o.den:
            return RatFn(self.num + o.num, self.den)
        return RatFn(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFn(-self.num, self.den, reduced=True)

    def __sub__(self, other):
        o = self._lift(other)
        return NotImplemented if o is None else self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        return NotImplemented if o is None else o + (-self)

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return RatFn(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def reciprocal(self) -> 'RatFn':
        if self.is_zero():
            raise ZeroDivisionError("reciprocal of the zero function")
        return RatFn(self.den, self.num)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self * o.reciprocal()

    def __rtruediv__(self, other):
        o = self._lift(other)
        return NotImplemented if o is None else o * self.reciprocal()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise AlgebraError(f"Exponent must be an integer, got {n}")
        if n < 0:
            return self.reciprocal() ** (-n)
        return RatFn(self.num ** n, self.den ** n, reduced=True)

    def __eq__(self, other):
        try:
            o = self._lift(other)
        except VariableMismatch:
            return False
        if o is None:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"RatFn({self.to_text()!r}, vars={self.vars})"

    def __str__(self):
        return self.to_text()

    # -- calculus and evaluation ----------------------------------------------

    def derive(self, name: str) -> 'RatFn':
        if name not in self.vars:
            raise UnknownVariable(f"Unknown variable '{name}' for {self.vars}")
        if self.is_polynomial():
            return RatFn(self.num.diff(name), self.den)
        top = self.num.diff(name) * self.den - self.num * self.den.diff(name)
        return RatFn(top, self.den * self.den)

    def evaluate(self, point: Sequence) -> Fraction:
        den = self.den.evaluate(point)
        if den == 0:
            raise PoleError(f"{self} has a pole at {tuple(str(to_rat(p)) for p in point)}")
        return self.num.evaluate(point) / den

    def substitute(self, mapping: Mapping[str, object],
                   variables: Optional[Sequence[str]] = None) -> 'RatFn':
        num = self.num.substitute(mapping, variables)
        den = self.den.substitute(mapping, variables or num.vars)
        if den.is_zero():
            raise SubstitutionError(f"Denominator of {self} vanishes identically under substitution")
        return RatFn(num, den)

    def substitute_rational(self, mapping: Mapping[str, 'RatFn']) -> 'RatFn':
        """Compose with rational images by clearing a common denominator per variable."""
        target = None
        for image in mapping.values():
            if isinstance(image, (RatFn, MPoly)):
                target = image.vars
                break
        if target is None:
            raise AlgebraError("Rational substitution needs at least one function image")
        result_num = _compose_rational(self.num, mapping, target)
        result_den = _compose_rational(self.den, mapping, target)
        if result_den.is_zero():
            raise SubstitutionError(f"Denominator of {self} vanishes identically under substitution")
        return result_num / result_den

    def with_vars(self, variables: Sequence[str]) -> 'RatFn':
        return RatFn(self.num.with_vars(variables), self.den.with_vars(variables), reduced=True)

    def uadic_order(self, name: str) -> int:
        if self.is_zero():
            raise ZeroFunctionError("The zero function has infinite order")
        return self.num.uadic_order(name) - self.den.uadic_order(name)

    def order_along(self, generator: MPoly) -> int:
        if self.is_zero():
            raise ZeroFunctionError("The zero function has infinite order")
        return self.num.order_along(generator) - self.den.order_along(generator)

    def to_text(self) -> str:
        if self.is_polynomial():
            return self.as_mpoly().to_text()
        num = self.num.to_text()
        if len(self.num.terms) > 1:
            num = f"({num})"
        den = self.den.to_text()
        if len(self.den.terms) > 1 or not (self.den.is_monomial() and self.den.leading_coefficient() == 1):
            den = f"({den})"
        return f"{num}/{den}"


def _compose_rational(poly: MPoly, mapping: Mapping[str, object], target: Tuple[str, ...]) -> 'RatFn':
    result = RatFn.const(target, 0)
    images = {}
    for name in poly.vars:
        if name in mapping:
            image = mapping[name]
            images[name] = image if isinstance(image, RatFn) else (
                RatFn(image) if isinstance(image, MPoly) else RatFn.const(target, image))
    powers: Dict[Tuple[str, int], RatFn] = {}
    for exp, c in poly.terms.items():
        term = RatFn.const(target, c)
        for name, e in zip(poly.vars, exp):
            if not e:
                continue
            if name not in images:
                raise UnknownVariable(f"Substitution does not cover '{name}'")
            key = (name, e)
            if key not in powers:
                powers[key] = images[name] ** e
            term = term * powers[key]
        result = result + term
    return result


def real_common_zeros(polys: Sequence[MPoly]) -> List[Tuple[Optional[Fraction], ...]]:
    """Real common zeros of a zero-dimensional system, in variable order.

    Irrational coordinates come back as None. Solutions whose reality sympy
    cannot settle are kept.
    """
    polys = [p for p in polys if not p.is_zero()]
    if not polys:
        raise AlgebraError("real_common_zeros needs a nonzero polynomial")
    variables = polys[0].vars
    used = tuple(v for v in variables if any(v in p.used_vars() for p in polys))
    if not used:
        return []
    ring = polys[0].element.ring
    symbols = [ring.symbols[variables.index(v)] for v in used]
    try:
        solutions = sympy.solve_poly_system([p.element.as_expr() for p in polys], *symbols)
    except (NotImplementedError, sympy.PolynomialError) as exc:
        raise AlgebraError(f"Cannot solve the system {[p.to_text() for p in polys]}: {exc}") from exc
    found = []
    for solution in solutions or []:
        if any(c.is_real is False for c in solution):
            continue
        values = dict(zip(used, (Fraction(str(c)) if c.is_Rational else None for c in solution)))
        found.append(tuple(values.get(v, Fraction(0)) for v in variables))
    return found


# =============================================================================
# Functional surface
# =============================================================================

def as_ratfn(value, variables: Sequence[str]) -> RatFn:
    if isinstance(value, RatFn):
        return value
    if isinstance(value, MPoly):
        return RatFn(value)
    return RatFn.const(variables, value)


def derive(f: RatFn, name: str) -> RatFn:
    return f.derive(name)


def substitute(f, mapping: Mapping[str, object], variables: Optional[Sequence[str]] = None) -> RatFn:
    return as_ratfn(f, variables or ()).substitute(mapping, variables)


def uadic_order(f, name: str) -> int:
    return f.uadic_order(name)


def squarefree(f: MPoly) -> List[Tuple[MPoly, int]]:
    return f.squarefree()


def eval_exact(f, point: Sequence) -> Fraction:
    return f.evaluate(point)


def partial(f: RatFn, multi_index: Mapping[str, int]) -> RatFn:
    """Mixed partial derivative, e.g. {'x': 2, 'y': 1}."""
    result = f
    for name, count in multi_index.items():
        for _ in range(count):
            result = result.derive(name)
    return result
