from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grd.algebra import (
    IDEMPOTENT_EVEN,
    IDEMPOTENT_ODD,
    ONE,
    SIGMA,
    AlgebraElement,
    LaurentPoly,
    Parity,
    divides_brute,
    exact_divide,
    is_monomial,
    laurent_embed,
    lift,
    multiply,
    parity_project,
    parse_laurent,
    positive_from_laurent,
    rational_roots,
    scheme_from_positive,
    to_algebra,
)
from grd.exact import factor_positive
from grd.exceptions import DegenerateElementError, DomainError, LaurentSyntaxError
from grd.schemes import catalog, parity_split, parse_scheme, resolve_scheme
from tests.strategies import laurent_polys, nonzero_rationals, positive_rationals, schemes


def x(r, c=1) -> AlgebraElement:
    return AlgebraElement.basis_element(Fraction(r), Fraction(c))


algebra_elements = st.dictionaries(nonzero_rationals, nonzero_rationals, max_size=4).map(
    AlgebraElement.from_mapping
)


def test_to_algebra_drops_node_zero():
    assert to_algebra(parse_scheme("1@1, -1@0")) == x(1)
    assert to_algebra(catalog("example3iii")) == (
        x(2, Fraction(1, 2)) + x(1, -1) + x(-1) + x(-2, Fraction(-1, 2))
    )


def test_to_algebra_rejects_node_zero_only():
    with pytest.raises(DegenerateElementError):
        to_algebra(parse_scheme("1@0"))


def test_multiply():
    assert multiply(x(1, 2) - x(-5, 7), x(3)) == x(3, 2) - x(-15, 7)
    assert multiply(x(Fraction(1, 2)), x(2)) == ONE
    assert not multiply(x(1) + x(-1), x(1) - x(-1))


def test_idempotents():
    assert IDEMPOTENT_EVEN * IDEMPOTENT_EVEN == IDEMPOTENT_EVEN
    assert IDEMPOTENT_ODD * IDEMPOTENT_ODD == IDEMPOTENT_ODD
    assert not IDEMPOTENT_EVEN * IDEMPOTENT_ODD
    assert IDEMPOTENT_EVEN + IDEMPOTENT_ODD == ONE
    assert SIGMA * SIGMA == ONE


@given(algebra_elements, algebra_elements, algebra_elements)
def test_ring_laws(a, b, c):
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * ONE == a


@pytest.mark.parametrize(
    "scheme, parity, expected",
    [
        ("catalog:example3iii", Parity.ODD, {2: 1, 1: -2}),
        ("catalog:example3iii", Parity.EVEN, {}),
        ("catalog:symmetric(3)", Parity.ODD, {Fraction(3, 2): 2, Fraction(1, 2): -6}),
        ("1@1, -1@0", Parity.EVEN, {1: 1}),
        ("1@1, -1@0", Parity.ODD, {1: 1}),
    ],
)
def test_parity_project(scheme, parity, expected):
    projected = parity_project(to_algebra(resolve_scheme(scheme)), parity)
    assert projected.as_dict() == expected
    assert projected.parity is parity


@given(algebra_elements)
def test_projection_matches_idempotent_multiplication(a):
    for parity, idempotent in [(Parity.EVEN, IDEMPOTENT_EVEN), (Parity.ODD, IDEMPOTENT_ODD)]:
        assert lift(parity_project(a, parity)) == idempotent * a


@settings(max_examples=200)
@given(schemes())
def test_projection_agrees_with_parity_split(s):
    if not any(node != 0 for node in s.nodes):
        return
    split = parity_split(s)
    for parity, part in [(Parity.EVEN, split.even), (Parity.ODD, split.odd)]:
        projected = parity_project(to_algebra(s), parity)
        if part is None or not any(node != 0 for node in part.nodes):
            assert not projected
        else:
            assert lift(projected) == to_algebra(part)


def test_scheme_from_positive_fixes_node_zero():
    even = positive_from_laurent(LaurentPoly.constant(1), Parity.EVEN)
    assert scheme_from_positive(even) == parse_scheme("1/2@1, -1@0, 1/2@-1")
    odd = positive_from_laurent(LaurentPoly.constant(1), Parity.ODD)
    assert scheme_from_positive(odd) == parse_scheme("1/2@1, -1/2@-1")


@pytest.mark.parametrize(
    "scheme, parity, text",
    [
        ("catalog:example3iii", Parity.ODD, "1*y2^1 - 2"),
        ("catalog:symmetric(3)", Parity.ODD, "2*y2^-1*y3^1 - 6*y2^-1"),
        ("1@1, -1@0", Parity.EVEN, "1"),
        ("catalog:example3iii", Parity.EVEN, "0"),
    ],
)
def test_laurent_embed(scheme, parity, text):
    embedded = laurent_embed(parity_project(to_algebra(resolve_scheme(scheme)), parity))
    assert embedded.format() == text
    assert parse_laurent(text) == embedded


@pytest.mark.parametrize("text", ["1*y4^1", "y2", "1*y2^1*y2^2", "1*y2^1 2", "", "1*y2^1 +"])
def test_parse_laurent_rejects(text):
    with pytest.raises(LaurentSyntaxError):
        parse_laurent(text)


def test_parse_laurent_defaults_exponent():
    assert parse_laurent("3*y5 - 1/2") == LaurentPoly.from_mapping(
        {factor_positive(5): Fraction(3), factor_positive(1): Fraction(-1, 2)}
    )


@pytest.mark.parametrize(
    "numerator, divisor, quotient",
    [
        ("1*y2^2 - 4", "1*y2^1 - 2", "1*y2^1 + 2"),
        ("1*y3^1 - 3", "1*y2^1 - 2", None),
        ("2*y2^-1*y3^1 - 6*y2^-1", "1*y3^1 - 3", "2*y2^-1"),
        ("1*y2^1 - 2", "2*y2^-1*y3^1 - 6*y2^-1", None),
        ("1*y2^3", "1*y2^-1", "1*y2^4"),
        ("0", "1*y3^1 + 1", "0"),
    ],
)
def test_exact_divide(numerator, divisor, quotient):
    result = exact_divide(parse_laurent(numerator), parse_laurent(divisor))
    brute = divides_brute(parse_laurent(numerator), parse_laurent(divisor), 2)
    if quotient is None:
        assert result is None
        assert brute is None
    else:
        assert result == parse_laurent(quotient)
        assert brute == result


def test_division_by_zero():
    with pytest.raises(DomainError):
        exact_divide(parse_laurent("1"), LaurentPoly())
    with pytest.raises(DomainError):
        divides_brute(parse_laurent("1"), LaurentPoly(), 0)


@given(laurent_polys(), laurent_polys())
def test_exact_divide_recovers_factor(a, b):
    product = a * b
    assert exact_divide(product, a) == b
    assert divides_brute(product, a, 0) == b


@given(laurent_polys(primes=(2, 3)), laurent_polys(primes=(2, 3)))
def test_exact_divide_agrees_with_linear_solve(numerator, divisor):
    quotient = exact_divide(numerator, divisor)
    assert quotient == divides_brute(numerator, divisor, 1)
    if quotient is not None:
        assert divisor * quotient == numerator


@given(laurent_polys(), positive_rationals)
def test_dilation_is_a_monomial_shift(p, u):
    shifted = p.shift(factor_positive(u))
    assert shifted == p * LaurentPoly.monomial(1, u)
    assert exact_divide(shifted, p) == LaurentPoly.monomial(1, u)


def test_is_monomial():
    assert is_monomial(parse_laurent("2*y2^-1")) == (2, Fraction(1, 2))
    assert is_monomial(parse_laurent("5")) == (5, 1)
    assert is_monomial(parse_laurent("1*y2^1 - 2")) is None


def test_rational_roots():
    assert rational_roots(parse_laurent("1*y2^1 - 2")) == [2]
    assert rational_roots(parse_laurent("2*y3^2 - 1*y3^1 - 1")) == [Fraction(-1, 2), 1]
    assert rational_roots(parse_laurent("1*y2^-1 + 1")) == [-1]
    assert rational_roots(parse_laurent("4")) == []
    with pytest.raises(DomainError):
        rational_roots(parse_laurent("1*y2^1 - 1*y3^1"))


def test_substitute_and_evaluate():
    p = parse_laurent("2*y2^-1*y3^1 - 6*y2^-1")
    assert p.substitute({2: 1}) == parse_laurent("2*y3^1 - 6")
    assert p.evaluate({2: 1, 3: 3}) == 0
    assert p.evaluate({2: 2, 3: 1}) == -2
