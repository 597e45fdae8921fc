"""Exact number substrate: rationals, the field Q(sqrt 2), prime exponent vectors
and Gauss-Jordan elimination over the rationals.

Nothing in this module rounds. Rationals are ``fractions.Fraction``; the only
irrational numbers in the engine are elements ``a + b*sqrt(2)`` of
:class:`QuadExtValue`, which are used to evaluate functions that branch on
membership in Q.
"""

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Annotated, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from pydantic import PlainSerializer, PlainValidator, WithJsonSchema

from grd.exceptions import DomainError, InputError


RATIONAL_PATTERN = r"-?\d+(?:/\d+)?"
_RATIONAL_RE = re.compile(rf"^{RATIONAL_PATTERN}$")
_QUAD_RE = re.compile(rf"^\s*({RATIONAL_PATTERN})\s*(?:([+-])\s*(-?\d+(?:/\d+)?)\s*\*\s*s2)?\s*$")

Number = Union[int, Fraction]


def parse_rational(text: str) -> Fraction:
    """Parse ``["-"] digits ["/" digits]`` into an exact rational."""
    text = text.strip()
    if not _RATIONAL_RE.match(text):
        raise InputError(f"invalid rational {text!r}")
    numerator, _, denominator = text.partition("/")
    if denominator and int(denominator) == 0:
        raise InputError(f"zero denominator in {text!r}")
    return Fraction(int(numerator), int(denominator) if denominator else 1)


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def to_rational(value) -> Fraction:
    if isinstance(value, bool):
        raise InputError("booleans are not rationals")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise InputError(f"cannot read {value!r} as an exact rational")


Rational = Annotated[
    Fraction,
    PlainValidator(to_rational),
    PlainSerializer(format_rational, return_type=str),
    WithJsonSchema({"type": "string", "pattern": f"^{RATIONAL_PATTERN}$"}),
]


def _sign(value: Fraction) -> int:
    return (value > 0) - (value < 0)


@dataclass(frozen=True, eq=False)
class QuadExtValue:
    """The number ``rat + irr*sqrt(2)`` with rational parts."""

    rat: Fraction = Fraction(0)
    irr: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "rat", Fraction(self.rat))
        object.__setattr__(self, "irr", Fraction(self.irr))

    @classmethod
    def coerce(cls, value: Union["QuadExtValue", Number]) -> "QuadExtValue":
        if isinstance(value, QuadExtValue):
            return value
        return cls(Fraction(value))

    @classmethod
    def parse(cls, text: str) -> "QuadExtValue":
        match = _QUAD_RE.match(text)
        if match is None:
            raise InputError(f"invalid element of Q(sqrt 2): {text!r}")
        rat, sign, irr = match.groups()
        if irr is None:
            return cls(parse_rational(rat))
        irr_value = parse_rational(irr)
        return cls(parse_rational(rat), irr_value if sign == "+" else -irr_value)

    @property
    def is_rational(self) -> bool:
        return self.irr == 0

    def conjugate(self) -> "QuadExtValue":
        return QuadExtValue(self.rat, -self.irr)

    def norm(self) -> Fraction:
        return self.rat * self.rat - 2 * self.irr * self.irr

    def sign(self) -> int:
        a, b = self.rat, self.irr
        if b == 0:
            return _sign(a)
        if a == 0 or _sign(a) == _sign(b):
            return _sign(b) if a == 0 else _sign(a)
        # opposite signs: the larger square wins, a^2 = 2 b^2 has no rational solution
        return _sign(a) if a * a > 2 * b * b else _sign(b)

    def __add__(self, other):
        other = QuadExtValue.coerce(other)
        return QuadExtValue(self.rat + other.rat, self.irr + other.irr)

    __radd__ = __add__

    def __neg__(self):
        return QuadExtValue(-self.rat, -self.irr)

    def __sub__(self, other):
        return self + (-QuadExtValue.coerce(other))

    def __rsub__(self, other):
        return QuadExtValue.coerce(other) - self

    def __mul__(self, other):
        other = QuadExtValue.coerce(other)
        return QuadExtValue(
            self.rat * other.rat + 2 * self.irr * other.irr,
            self.rat * other.irr + self.irr * other.rat,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = QuadExtValue.coerce(other)
        norm = other.norm()
        if norm == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt 2)")
        product = self * other.conjugate()
        return QuadExtValue(product.rat / norm, product.irr / norm)

    def __rtruediv__(self, other):
        return QuadExtValue.coerce(other) / self

    def __pow__(self, exponent: int):
        if exponent < 0:
            return QuadExtValue(1) / (self ** (-exponent))
        result, base = QuadExtValue(1), self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __bool__(self):
        return self.rat != 0 or self.irr != 0

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QuadExtValue(other)
        if not isinstance(other, QuadExtValue):
            return NotImplemented
        return self.rat == other.rat and self.irr == other.irr

    def __hash__(self):
        return hash((self.rat, self.irr))

    def __lt__(self, other):
        return (self - QuadExtValue.coerce(other)).sign() < 0

    def __le__(self, other):
        return (self - QuadExtValue.coerce(other)).sign() <= 0

    def __gt__(self, other):
        return (self - QuadExtValue.coerce(other)).sign() > 0

    def __ge__(self, other):
        return (self - QuadExtValue.coerce(other)).sign() >= 0

    def __str__(self):
        if self.irr == 0:
            return format_rational(self.rat)
        sign = "-" if self.irr < 0 else "+"
        return f"{format_rational(self.rat)}{sign}{format_rational(abs(self.irr))}*s2"

    def __repr__(self):
        return f"QuadExtValue({self})"


SQRT2 = QuadExtValue(0, 1)


def to_quad(value) -> QuadExtValue:
    if isinstance(value, QuadExtValue):
        return value
    if isinstance(value, str):
        return QuadExtValue.parse(value)
    return QuadExtValue.coerce(to_rational(value))


QuadField = Annotated[
    QuadExtValue,
    PlainValidator(to_quad),
    PlainSerializer(str, return_type=str),
    WithJsonSchema({"type": "string", "examples": ["1/2+3*s2"]}),
]


@dataclass(frozen=True)
class ExponentVector:
    """Finite map prime -> nonzero integer exponent; the empty vector is 1."""

    entries: Tuple[Tuple[int, int], ...] = ()

    @classmethod
    def from_mapping(cls, exponents: Mapping[int, int]) -> "ExponentVector":
        return cls(tuple(sorted((p, e) for p, e in exponents.items() if e != 0)))

    def as_dict(self) -> Dict[int, int]:
        return dict(self.entries)

    @property
    def primes(self) -> Tuple[int, ...]:
        return tuple(p for p, _ in self.entries)

    def exponent(self, prime: int) -> int:
        return self.as_dict().get(prime, 0)

    def as_tuple(self, basis: Sequence[int]) -> Tuple[int, ...]:
        exponents = self.as_dict()
        return tuple(exponents.get(p, 0) for p in basis)

    @property
    def norm(self) -> int:
        return sum(abs(e) for _, e in self.entries)

    @property
    def is_nonnegative(self) -> bool:
        return all(e >= 0 for _, e in self.entries)

    def __add__(self, other: "ExponentVector") -> "ExponentVector":
        exponents = self.as_dict()
        for p, e in other.entries:
            exponents[p] = exponents.get(p, 0) + e
        return ExponentVector.from_mapping(exponents)

    def __neg__(self) -> "ExponentVector":
        return ExponentVector(tuple((p, -e) for p, e in self.entries))

    def __sub__(self, other: "ExponentVector") -> "ExponentVector":
        return self + (-other)

    def to_rational(self) -> Fraction:
        value = Fraction(1)
        for p, e in self.entries:
            value *= Fraction(p) ** e
        return value

    def __str__(self):
        return "{" + ", ".join(f"{p}: {e}" for p, e in self.entries) + "}"


def factor_integer(n: int) -> Dict[int, int]:
    """Trial division; node values are small so nothing cleverer is needed."""
    if n < 1:
        raise DomainError(f"cannot factor {n}")
    factors: Dict[int, int] = {}
    divisor = 2
    while divisor * divisor <= n:
        while n % divisor == 0:
            factors[divisor] = factors.get(divisor, 0) + 1
            n //= divisor
        divisor += 1 if divisor == 2 else 2
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    return factors


def factor_positive(r: Number) -> ExponentVector:
    """Exponent vector of a positive rational over the prime basis of Q+."""
    r = Fraction(r)
    if r <= 0:
        raise DomainError(f"factor_positive needs a positive rational, got {format_rational(r)}")
    exponents = factor_integer(r.numerator)
    for p, e in factor_integer(r.denominator).items():
        exponents[p] = exponents.get(p, 0) - e
    return ExponentVector.from_mapping(exponents)


def reconstruct(vector: ExponentVector) -> Fraction:
    return vector.to_rational()


def valuation(r: Fraction, prime: int) -> int:
    """p-adic valuation of a nonzero rational."""
    numerator, denominator, v = abs(r.numerator), r.denominator, 0
    while numerator % prime == 0:
        numerator //= prime
        v += 1
    while denominator % prime == 0:
        denominator //= prime
        v -= 1
    return v


def split_over_primes(r: Fraction, primes: Iterable[int]) -> Optional[ExponentVector]:
    """Exponent vector of ``|r|`` if it only involves ``primes``, else None."""
    r = abs(Fraction(r))
    if r == 0:
        return None
    exponents = {}
    numerator, denominator = r.numerator, r.denominator
    for p in primes:
        e = 0
        while numerator % p == 0:
            numerator //= p
            e += 1
        while denominator % p == 0:
            denominator //= p
            e -= 1
        exponents[p] = e
    if numerator != 1 or denominator != 1:
        return None
    return ExponentVector.from_mapping(exponents)


def smallest_prime_outside(primes: Iterable[int]) -> int:
    excluded = set(primes)
    candidate = 2
    while candidate in excluded or factor_integer(candidate) != {candidate: 1}:
        candidate += 1
    return candidate


def divisors(n: int) -> List[int]:
    n = abs(n)
    result = [1]
    for p, e in factor_integer(n).items():
        result = [d * p**k for d in result for k in range(e + 1)]
    return sorted(result)


@dataclass(frozen=True)
class LinearSolution:
    """Outcome of an exact solve; ``values`` is None when infeasible."""

    values: Optional[Tuple[Fraction, ...]]
    free_count: int = 0

    @property
    def feasible(self) -> bool:
        return self.values is not None


Row = Union[Sequence[Number], Mapping[int, Number]]


def _as_sparse(row: Row) -> Dict[int, Fraction]:
    items = row.items() if isinstance(row, Mapping) else enumerate(row)
    return {col: Fraction(c) for col, c in items if c != 0}


def solve_linear_exact(
    coeff_rows: Sequence[Row],
    rhs: Sequence[Number],
    n_cols: Optional[int] = None,
    free_values: Optional[Sequence[Number]] = None,
) -> LinearSolution:
    """Solve ``coeff_rows * x = rhs`` exactly by Gauss-Jordan elimination.

    Rows are dense sequences of equal length or sparse ``{column: coeff}``
    mappings (``n_cols`` is then required unless every column appears). Free
    variables are set to 0, or to ``free_values`` in increasing column order.
    """
    if len(coeff_rows) != len(rhs):
        raise ValueError("one right-hand side entry per row is required")
    dense_lengths = {len(row) for row in coeff_rows if not isinstance(row, Mapping)}
    if len(dense_lengths) > 1:
        raise ValueError("coefficient rows must have equal length")
    if n_cols is None:
        n_cols = max(
            [*dense_lengths, *(max(row, default=-1) + 1 for row in coeff_rows if isinstance(row, Mapping))],
            default=0,
        )

    # pivot column -> (row, rhs); every pivot row is kept free of other pivot columns
    pivots: Dict[int, Tuple[Dict[int, Fraction], Fraction]] = {}
    for raw, b in zip(coeff_rows, rhs):
        row, b = _as_sparse(raw), Fraction(b)
        for col in [c for c in row if c in pivots]:
            factor = row.get(col)
            if not factor:
                continue
            pivot_row, pivot_b = pivots[col]
            for c, v in pivot_row.items():
                updated = row.get(c, Fraction(0)) - factor * v
                if updated:
                    row[c] = updated
                else:
                    row.pop(c, None)
            b -= factor * pivot_b
        if not row:
            if b != 0:
                logging.debug("exact solve: inconsistent row after elimination")
                return LinearSolution(values=None)
            continue
        col = min(row)
        lead = row[col]
        row = {c: v / lead for c, v in row.items()}
        b /= lead
        for other_col, (other_row, other_b) in list(pivots.items()):
            factor = other_row.get(col)
            if not factor:
                continue
            for c, v in row.items():
                updated = other_row.get(c, Fraction(0)) - factor * v
                if updated:
                    other_row[c] = updated
                else:
                    other_row.pop(c, None)
            pivots[other_col] = (other_row, other_b - factor * b)
        pivots[col] = (row, b)

    free_cols = [c for c in range(n_cols) if c not in pivots]
    assignment = {c: Fraction(0) for c in free_cols}
    if free_values is not None:
        if len(free_values) != len(free_cols):
            raise ValueError(f"expected {len(free_cols)} free values, got {len(free_values)}")
        assignment.update({c: Fraction(v) for c, v in zip(free_cols, free_values)})
    values = []
    for col in range(n_cols):
        if col in pivots:
            row, b = pivots[col]
            values.append(b - sum(v * assignment[c] for c, v in row.items() if c != col))
        else:
            values.append(assignment[col])
    return LinearSolution(values=tuple(values), free_count=len(free_cols))
