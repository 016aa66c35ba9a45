"""
Hypothesis strategies shared by the property tests.
"""

from fractions import Fraction

from hypothesis import strategies as st

from core.services.exact_algebra import MPoly, RatFn

VARS = ('x', 'y')

coefficients = st.builds(
    Fraction,
    st.integers(min_value=-6, max_value=6),
    st.integers(min_value=1, max_value=4),
)

exponents = st.tuples(st.integers(min_value=0, max_value=3), st.integers(min_value=0, max_value=3))

polynomials = st.dictionaries(exponents, coefficients, max_size=4).map(
    lambda terms: MPoly.from_terms(VARS, terms))

nonzero_polynomials = polynomials.filter(lambda p: not p.is_zero())

points = st.tuples(coefficients, coefficients)


@st.composite
def rational_functions(draw):
    """p / (q^2 + 1), whose denominator has no real zero."""
    p = draw(polynomials)
    q = draw(polynomials)
    return RatFn(p, q * q + 1)


FLAT_DENOMINATORS = (
    MPoly.from_terms(VARS, {(2, 0): 1, (0, 2): 1}),
    MPoly.from_terms(VARS, {(2, 0): 1, (0, 2): 2}),
)


@st.composite
def monomial_multiples(draw, degree):
    """x^a * y^b * c with a + b >= degree and c nonzero."""
    a = draw(st.integers(min_value=0, max_value=degree))
    b = degree - a + draw(st.integers(min_value=0, max_value=1))
    return MPoly.from_terms(VARS, {(a, b): 1}) * draw(nonzero_polynomials)


@st.composite
def flat_sums(draw, k):
    """p + q1/r1 + q2/r2 with ord(q_i) - ord(r_i) > k at the blowup of the origin.

    Returns the sum and its (q, r) terms.
    """
    p = draw(polynomials)
    terms = [(draw(monomial_multiples(k + 3)), r) for r in FLAT_DENOMINATORS]
    f = RatFn(p)
    for q, r in terms:
        f = f + RatFn(q, r)
    return f, terms


@st.composite
def units_at_origin(draw):
    """1 + p - p(0, 0)."""
    p = draw(polynomials)
    return p - p.evaluate((0, 0)) + 1
