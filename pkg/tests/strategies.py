from fractions import Fraction

from hypothesis import strategies as st

from grd.algebra import LaurentPoly
from grd.exact import ExponentVector
from grd.schemes import DiffScheme, grd_from_nodes


small_rationals = st.fractions(min_value=-4, max_value=4, max_denominator=4)
nonzero_rationals = small_rationals.filter(lambda q: q != 0)
positive_rationals = st.fractions(min_value=Fraction(1, 4), max_value=4, max_denominator=4).filter(
    lambda q: q > 0
)


@st.composite
def schemes(draw, max_terms: int = 6) -> DiffScheme:
    nodes = draw(st.lists(small_rationals, min_size=1, max_size=max_terms, unique=True))
    coefficients = draw(st.lists(nonzero_rationals, min_size=len(nodes), max_size=len(nodes)))
    return DiffScheme.from_terms(zip(coefficients, nodes))


@st.composite
def grds(draw, orders=st.integers(min_value=1, max_value=4), excess=st.integers(min_value=0, max_value=2)) -> DiffScheme:
    n, e = draw(orders), draw(excess)
    nodes = draw(st.lists(small_rationals, min_size=n + 1 + e, max_size=n + 1 + e, unique=True))
    free_values = draw(st.lists(nonzero_rationals, min_size=e, max_size=e))
    return grd_from_nodes(nodes, n, free_values=free_values)


@st.composite
def laurent_polys(draw, primes=(2, 3, 5), max_terms: int = 3, exponent: int = 2) -> LaurentPoly:
    basis = draw(st.lists(st.sampled_from(primes), min_size=1, max_size=len(primes), unique=True))
    basis = sorted(basis)
    terms = draw(
        st.dictionaries(
            st.tuples(*[st.integers(min_value=-exponent, max_value=exponent)] * len(basis)),
            st.integers(min_value=-3, max_value=3).filter(lambda c: c != 0),
            min_size=1,
            max_size=max_terms,
        )
    )
    return LaurentPoly.from_mapping(
        {ExponentVector.from_mapping(dict(zip(basis, key))): Fraction(c) for key, c in terms.items()},
        basis,
    )
