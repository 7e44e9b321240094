import random
import sys
from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from diffinv.diffop import LinearDiffOp
from diffinv.polycore import Polynomial, RationalFunction
from diffinv.polycore.multiindex import multi_indices, multi_indices_upto
from diffinv.transvect import NAryForm, form_variables

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")

small_ints = st.integers(min_value=-9, max_value=9)
small_fracs = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@st.composite
def polys(draw, variables=("x", "y", "z"), max_degree=4, max_terms=6, coeffs=small_ints):
    n = len(variables)
    k = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(k):
        mono = tuple(draw(st.lists(st.integers(0, max_degree), min_size=n, max_size=n)))
        if sum(mono) > max_degree:
            continue
        terms[mono] = terms.get(mono, 0) + draw(coeffs)
    return Polynomial(variables, terms)


@st.composite
def forms(draw, n=2, degree=4, coeffs=small_ints):
    variables = form_variables(n)
    terms = {a: draw(coeffs) for a in multi_indices(n, degree)}
    return NAryForm(Polynomial(variables, terms), n, degree)


def random_form(rng: random.Random, n: int, degree: int, lo=-9, hi=9) -> NAryForm:
    variables = form_variables(n)
    terms = {a: rng.randint(lo, hi) for a in multi_indices(n, degree)}
    return NAryForm(Polynomial(variables, terms), n, degree)


def random_poly(rng: random.Random, variables, max_degree: int, nterms: int, lo=-3, hi=3) -> Polynomial:
    n = len(variables)
    terms = {}
    for _ in range(nterms):
        mono = [0] * n
        for _ in range(rng.randint(0, max_degree)):
            mono[rng.randrange(n)] += 1
        terms[tuple(mono)] = rng.randint(lo, hi)
    return Polynomial(variables, terms)


def random_operator(rng: random.Random, coords, k: int, params=(), rational=False, density=0.6) -> LinearDiffOp:
    """Random operator of exact order k with small polynomial (optionally rational) coefficients."""
    ring = tuple(coords) + tuple(params)
    coeffs = {}
    for alpha in multi_indices_upto(len(coords), k):
        if sum(alpha) < k and rng.random() > density:
            continue
        c = RationalFunction.lift(random_poly(rng, ring, 2, 2), ring)
        if rational and rng.random() < 0.3:
            den = random_poly(rng, ring, 1, 2, 1, 3) + Polynomial.constant(5, ring)
            c = c / RationalFunction.lift(den, ring)
        coeffs[alpha] = c
    top = next(iter(multi_indices(len(coords), k)))
    if all(coeffs.get(a) is None or coeffs[a].is_zero() for a in multi_indices(len(coords), k)):
        coeffs[top] = RationalFunction.constant(rng.choice([1, 2, -3]), ring)
    return LinearDiffOp(coords, coeffs, params)


def random_sl(rng: random.Random, n: int, steps: int = 8):
    """Product of elementary integer matrices (determinant 1)."""
    m = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(rng.randint(1, steps)):
        i, j = rng.sample(range(n), 2)
        c = rng.choice([-2, -1, 1, 2])
        m = [[m[r][s] + (c * m[j][s] if r == i else 0) for s in range(n)] for r in range(n)]
    return m


def random_gl(rng: random.Random, n: int):
    """Random invertible rational matrix."""
    while True:
        m = [[Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(n)] for _ in range(n)]
        if _det(m) != 0:
            return m


def _det(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    return sum((-1) ** j * m[0][j] * _det([row[:j] + row[j + 1:] for row in m[1:]]) for j in range(n))


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    results = getattr(acceptance, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        status, title = results[number]
        terminalreporter.write_line(f"{status} criterion {number}: {title}")
