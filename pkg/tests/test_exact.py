from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from grd.exact import (
    SQRT2,
    ExponentVector,
    QuadExtValue,
    divisors,
    factor_positive,
    format_rational,
    parse_rational,
    reconstruct,
    smallest_prime_outside,
    solve_linear_exact,
    split_over_primes,
    valuation,
)
from grd.exceptions import DomainError, InputError


positive = st.fractions(min_value=Fraction(1, 1000), max_value=1000, max_denominator=1000).filter(
    lambda q: q > 0
)


@pytest.mark.parametrize(
    "r, expected",
    [
        (12, {2: 2, 3: 1}),
        (1, {}),
        (Fraction(3, 2), {2: -1, 3: 1}),
        (Fraction(25, 12), {2: -2, 3: -1, 5: 2}),
    ],
)
def test_factor_positive(r, expected):
    assert factor_positive(r).as_dict() == expected


@pytest.mark.parametrize("r", [0, -1, Fraction(-3, 2)])
def test_factor_positive_rejects_non_positive(r):
    with pytest.raises(DomainError):
        factor_positive(r)


@given(positive)
def test_reconstruct_inverts_factor(r):
    assert reconstruct(factor_positive(r)) == r


@given(positive, positive)
def test_factor_is_additive(r, s):
    assert factor_positive(r * s) == factor_positive(r) + factor_positive(s)


def test_exponent_vector():
    v = ExponentVector.from_mapping({3: 1, 2: -2, 5: 0})
    assert v.entries == ((2, -2), (3, 1))
    assert v.norm == 3
    assert not v.is_nonnegative
    assert str(v) == "{2: -2, 3: 1}"
    assert v.as_tuple([2, 3, 5]) == (-2, 1, 0)
    assert v - v == ExponentVector()
    assert v.to_rational() == Fraction(3, 4)


@pytest.mark.parametrize(
    "text, value",
    [("3", Fraction(3)), ("-3/4", Fraction(-3, 4)), ("6/4", Fraction(3, 2)), ("0", Fraction(0))],
)
def test_parse_rational(text, value):
    assert parse_rational(text) == value


@pytest.mark.parametrize("text", ["1/0", "abc", "1.5", "", "2/-3"])
def test_parse_rational_rejects(text):
    with pytest.raises(InputError):
        parse_rational(text)


def test_format_rational():
    assert format_rational(Fraction(-3, 4)) == "-3/4"
    assert format_rational(Fraction(4, 2)) == "2"


def test_number_theory_helpers():
    assert valuation(Fraction(12, 5), 2) == 2
    assert valuation(Fraction(12, 5), 5) == -1
    assert split_over_primes(Fraction(-9, 4), [2, 3]).as_dict() == {2: -2, 3: 2}
    assert split_over_primes(Fraction(5, 4), [2, 3]) is None
    assert split_over_primes(Fraction(1), []) == ExponentVector()
    assert smallest_prime_outside([]) == 2
    assert smallest_prime_outside([2, 3]) == 5
    assert smallest_prime_outside([2, 3, 5, 7]) == 11
    assert divisors(12) == [1, 2, 3, 4, 6, 12]


def test_solve_unique():
    solution = solve_linear_exact([[1, 1], [1, -1]], [2, 0])
    assert solution.values == (1, 1)
    assert solution.free_count == 0


def test_solve_underdetermined():
    solution = solve_linear_exact([[1, 1]], [1])
    assert solution.values == (1, 0)
    assert solution.free_count == 1


def test_solve_free_values():
    solution = solve_linear_exact([[1, 1]], [1], free_values=[5])
    assert solution.values == (-4, 5)


def test_solve_inconsistent():
    solution = solve_linear_exact([[1], [1]], [0, 1])
    assert not solution.feasible


def test_solve_sparse_rows():
    solution = solve_linear_exact([{0: 1, 2: 1}, {1: 2}], [3, 4], n_cols=3)
    assert solution.values == (3, 2, 0)


def test_solve_rejects_mismatched_shapes():
    with pytest.raises(ValueError):
        solve_linear_exact([[1, 2], [1]], [0, 0])
    with pytest.raises(ValueError):
        solve_linear_exact([[1, 2]], [0, 0])


@st.composite
def invertible_systems(draw):
    n = draw(st.integers(min_value=1, max_value=4))
    entries = st.integers(min_value=-3, max_value=3)
    nonzero = entries.filter(lambda v: v != 0)
    lower = [[1 if i == j else (draw(entries) if j < i else 0) for j in range(n)] for i in range(n)]
    upper = [[draw(nonzero) if i == j else (draw(entries) if j > i else 0) for j in range(n)] for i in range(n)]
    matrix = [[sum(lower[i][k] * upper[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    x = [Fraction(draw(entries), draw(st.integers(min_value=1, max_value=3))) for _ in range(n)]
    return matrix, x


@given(invertible_systems())
def test_solve_recovers_solution(system):
    matrix, x = system
    rhs = [sum(a * v for a, v in zip(row, x)) for row in matrix]
    assert solve_linear_exact(matrix, rhs).values == tuple(x)


def test_quadratic_field_arithmetic():
    one_plus = QuadExtValue(1, 1)
    assert one_plus * one_plus.conjugate() == -1
    assert 1 / one_plus == QuadExtValue(-1, 1)
    assert SQRT2**2 == 2
    assert (SQRT2 ** -1) == QuadExtValue(0, Fraction(1, 2))
    assert QuadExtValue(3, -2).sign() == 1
    assert QuadExtValue(1, -1).sign() == -1
    assert abs(QuadExtValue(1, -1)) == QuadExtValue(-1, 1)
    assert QuadExtValue(0, 1) > Fraction(7, 5)
    assert QuadExtValue(0, 1) < Fraction(3, 2)
    with pytest.raises(ZeroDivisionError):
        one_plus / 0


@pytest.mark.parametrize("text", ["1/2-3*s2", "0+1*s2", "-2", "7/3"])
def test_quadratic_field_text(text):
    assert str(QuadExtValue.parse(text)) == text


def test_quadratic_field_parse_rational_only():
    assert QuadExtValue.parse("5/3") == Fraction(5, 3)
    with pytest.raises(InputError):
        QuadExtValue.parse("sqrt2")
