"""Group algebra of the nonzero rationals and its Laurent polynomial image.

A scheme without its node-0 term is the element ``sum A_r x_r`` with
``x_r x_s = x_{rs}``. The idempotents ``e = (1 + sigma)/2`` and
``d = (1 - sigma)/2`` (``sigma = x_{-1}``) split it into an even and an odd
component; each component is a group algebra of the positive rationals, which
the prime factorization turns into Laurent polynomials in one variable per prime.
Ideal inclusion between principal ideals is then exact division.
"""

import itertools
import logging
import math
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Annotated, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from pydantic import PlainSerializer, PlainValidator, WithJsonSchema

from grd.exact import (
    ExponentVector,
    divisors,
    factor_integer,
    factor_positive,
    format_rational,
    parse_rational,
    solve_linear_exact,
)
from grd.exceptions import DegenerateElementError, DomainError, LaurentSyntaxError
from grd.schemes import DiffScheme, build_scheme


class Parity(str, Enum):
    """Parity of a component under h -> -h."""

    EVEN = "even"
    ODD = "odd"

    @classmethod
    def of_order(cls, n: int) -> "Parity":
        return cls.EVEN if n % 2 == 0 else cls.ODD

    def opposite(self) -> "Parity":
        return Parity.ODD if self is Parity.EVEN else Parity.EVEN


def _pruned(mapping: Mapping[Fraction, Fraction]) -> Tuple[Tuple[Fraction, Fraction], ...]:
    return tuple(
        sorted(
            ((Fraction(r), Fraction(c)) for r, c in mapping.items() if c != 0),
            key=lambda term: term[0],
            reverse=True,
        )
    )


@dataclass(frozen=True)
class AlgebraElement:
    """Finite sum ``sum c_r x_r`` over nonzero rationals r."""

    terms: Tuple[Tuple[Fraction, Fraction], ...] = ()

    @classmethod
    def from_mapping(cls, mapping: Mapping[Fraction, Fraction]) -> "AlgebraElement":
        terms = _pruned(mapping)
        if any(r == 0 for r, _ in terms):
            raise DegenerateElementError("x_0 is not an element of the algebra")
        return cls(terms)

    @classmethod
    def basis_element(cls, r: Fraction, coeff: Fraction = Fraction(1)) -> "AlgebraElement":
        return cls.from_mapping({Fraction(r): Fraction(coeff)})

    def as_dict(self) -> Dict[Fraction, Fraction]:
        return dict(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        total = self.as_dict()
        for r, c in other.terms:
            total[r] = total.get(r, Fraction(0)) + c
        return AlgebraElement.from_mapping(total)

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(tuple((r, -c) for r, c in self.terms))

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return AlgebraElement.from_mapping({r: c * other for r, c in self.terms})
        product: Dict[Fraction, Fraction] = {}
        for r, a in self.terms:
            for s, b in other.terms:
                product[r * s] = product.get(r * s, Fraction(0)) + a * b
        return AlgebraElement.from_mapping(product)

    __rmul__ = __mul__

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{format_rational(c)}*x[{format_rational(r)}]" for r, c in self.terms)


ONE = AlgebraElement.basis_element(1)
SIGMA = AlgebraElement.basis_element(-1)
IDEMPOTENT_EVEN = AlgebraElement.from_mapping({Fraction(1): Fraction(1, 2), Fraction(-1): Fraction(1, 2)})
IDEMPOTENT_ODD = AlgebraElement.from_mapping({Fraction(1): Fraction(1, 2), Fraction(-1): Fraction(-1, 2)})


def to_algebra(s: DiffScheme) -> AlgebraElement:
    """Drop the node-0 term; the rest is ``sum A_r x_r``."""
    element = AlgebraElement.from_mapping({node: c for c, node in s.terms if node != 0})
    if not element:
        raise DegenerateElementError(f"{s} is supported only on node 0")
    return element


def multiply(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    return a * b


@dataclass(frozen=True)
class PositivePart:
    """``e*alpha`` or ``d*alpha`` written in the basis e_r (d_r), r > 0."""

    terms: Tuple[Tuple[Fraction, Fraction], ...]
    parity: Parity

    @classmethod
    def from_mapping(cls, mapping: Mapping[Fraction, Fraction], parity: Parity) -> "PositivePart":
        terms = _pruned(mapping)
        if any(r <= 0 for r, _ in terms):
            raise DomainError("positive parts are supported on positive rationals")
        return cls(terms, Parity(parity))

    def as_dict(self) -> Dict[Fraction, Fraction]:
        return dict(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def __str__(self):
        symbol = "e" if self.parity is Parity.EVEN else "d"
        if not self.terms:
            return "0"
        return " + ".join(f"{format_rational(c)}*{symbol}[{format_rational(r)}]" for r, c in self.terms)


def parity_project(a: AlgebraElement, parity: Parity) -> PositivePart:
    parity = Parity(parity)
    coefficients = a.as_dict()
    sign = 1 if parity is Parity.EVEN else -1
    projected = {
        r: coefficients.get(r, Fraction(0)) + sign * coefficients.get(-r, Fraction(0))
        for r in {abs(r) for r in coefficients}
    }
    return PositivePart.from_mapping(projected, parity)


def lift(p: PositivePart) -> AlgebraElement:
    """Back from e_r (d_r) to ``(x_r +- x_{-r}) / 2``."""
    sign = 1 if p.parity is Parity.EVEN else -1
    lifted: Dict[Fraction, Fraction] = {}
    for r, c in p.terms:
        lifted[r] = c / 2
        lifted[-r] = sign * c / 2
    return AlgebraElement.from_mapping(lifted)


def scheme_from_positive(p: PositivePart) -> Optional[DiffScheme]:
    """The scheme of ``lift(p)`` with the node-0 coefficient fixed by a zero 0th moment."""
    coefficients = lift(p).as_dict()
    coefficients[Fraction(0)] = -sum(coefficients.values(), Fraction(0))
    return build_scheme(coefficients)


def _grlex_key(vector: Tuple[int, ...]) -> Tuple[int, Tuple[int, ...]]:
    return sum(vector), vector


@dataclass(frozen=True, eq=False)
class LaurentPoly:
    """Laurent polynomial over Q in variables y_p, one per prime of ``basis``."""

    terms: Tuple[Tuple[ExponentVector, Fraction], ...] = ()
    basis: Tuple[int, ...] = ()

    @classmethod
    def from_mapping(
        cls, mapping: Mapping[ExponentVector, Fraction], basis: Iterable[int] = ()
    ) -> "LaurentPoly":
        terms = tuple(
            sorted(
                ((v, Fraction(c)) for v, c in mapping.items() if c != 0),
                key=lambda term: term[0].entries,
            )
        )
        primes = set(basis)
        for vector, _ in terms:
            primes.update(vector.primes)
        return cls(terms, tuple(sorted(primes)))

    @classmethod
    def constant(cls, c: Fraction, basis: Iterable[int] = ()) -> "LaurentPoly":
        return cls.from_mapping({ExponentVector(): Fraction(c)}, basis)

    @classmethod
    def monomial(cls, c: Fraction, point: Fraction, basis: Iterable[int] = ()) -> "LaurentPoly":
        return cls.from_mapping({factor_positive(point): Fraction(c)}, basis)

    def as_dict(self) -> Dict[ExponentVector, Fraction]:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        total = self.as_dict()
        for v, c in other.terms:
            total[v] = total.get(v, Fraction(0)) + c
        return LaurentPoly.from_mapping(total, set(self.basis) | set(other.basis))

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(tuple((v, -c) for v, c in self.terms), self.basis)

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return LaurentPoly.from_mapping({v: c * other for v, c in self.terms}, self.basis)
        product: Dict[ExponentVector, Fraction] = {}
        for v, a in self.terms:
            for w, b in other.terms:
                key = v + w
                product[key] = product.get(key, Fraction(0)) + a * b
        return LaurentPoly.from_mapping(product, set(self.basis) | set(other.basis))

    __rmul__ = __mul__

    def shift(self, vector: ExponentVector) -> "LaurentPoly":
        return LaurentPoly.from_mapping({v + vector: c for v, c in self.terms}, self.basis)

    def with_basis(self, basis: Iterable[int]) -> "LaurentPoly":
        return LaurentPoly.from_mapping(self.as_dict(), set(self.basis) | set(basis))

    def evaluate(self, point: Mapping[int, Fraction]) -> Fraction:
        """Value at ``y_p = point[p]``; every basis variable must be assigned a nonzero value."""
        total = Fraction(0)
        for vector, c in self.terms:
            value = c
            for p, e in vector.entries:
                value *= Fraction(point[p]) ** e
            total += value
        return total

    def substitute(self, assignment: Mapping[int, Fraction]) -> "LaurentPoly":
        """Partial evaluation at the assigned variables."""
        result: Dict[ExponentVector, Fraction] = {}
        for vector, c in self.terms:
            kept = {}
            for p, e in vector.entries:
                if p in assignment:
                    c *= Fraction(assignment[p]) ** e
                else:
                    kept[p] = e
            key = ExponentVector.from_mapping(kept)
            result[key] = result.get(key, Fraction(0)) + c
        remaining = [p for p in self.basis if p not in assignment]
        return LaurentPoly.from_mapping(result, remaining)

    def min_exponents(self) -> Tuple[int, ...]:
        return tuple(min(v.exponent(p) for v, _ in self.terms) for p in self.basis)

    def max_exponents(self) -> Tuple[int, ...]:
        return tuple(max(v.exponent(p) for v, _ in self.terms) for p in self.basis)

    def leading_term(self) -> Tuple[ExponentVector, Fraction]:
        return max(self.terms, key=lambda term: _grlex_key(term[0].as_tuple(self.basis)))

    def format(self) -> str:
        if not self.terms:
            return "0"
        ordered = sorted(
            self.terms, key=lambda term: _grlex_key(term[0].as_tuple(self.basis)), reverse=True
        )
        pieces = []
        for index, (vector, c) in enumerate(ordered):
            body = format_rational(abs(c)) + "".join(f"*y{p}^{e}" for p, e in vector.entries)
            if index == 0:
                pieces.append(body if c > 0 else f"-{body}")
            else:
                pieces.append(f"{'+' if c > 0 else '-'} {body}")
        return " ".join(pieces)

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"LaurentPoly({self.format()!r})"


_LAURENT_TERM = re.compile(r"\s*([+-])?\s*(\d+(?:/\d+)?)((?:\s*\*\s*y\d+(?:\^-?\d+)?)*)\s*")
_LAURENT_VARIABLE = re.compile(r"\*\s*y(\d+)(?:\^(-?\d+))?")


def parse_laurent(text: str) -> LaurentPoly:
    """Parse ``c*y2^e*y3^f`` terms joined by ``+`` / ``-``; the coefficient is mandatory."""
    if text.strip() == "0":
        return LaurentPoly()
    pos, terms = 0, {}
    if not text.strip():
        raise LaurentSyntaxError("empty Laurent polynomial")
    while pos < len(text):
        match = _LAURENT_TERM.match(text, pos)
        if match is None or match.end() == pos:
            raise LaurentSyntaxError(f"unexpected input at position {pos}")
        sign, coeff, variables = match.groups()
        if sign is None and terms:
            raise LaurentSyntaxError(f"expected '+' or '-' at position {pos}")
        exponents: Dict[int, int] = {}
        for prime, exponent in _LAURENT_VARIABLE.findall(variables):
            prime = int(prime)
            if factor_integer(prime) != {prime: 1}:
                raise LaurentSyntaxError(f"variable y{prime} is not indexed by a prime")
            if prime in exponents:
                raise LaurentSyntaxError(f"variable y{prime} repeated in one term")
            exponents[prime] = int(exponent) if exponent else 1
        vector = ExponentVector.from_mapping(exponents)
        value = parse_rational(coeff) * (-1 if sign == "-" else 1)
        terms[vector] = terms.get(vector, Fraction(0)) + value
        pos = match.end()
    return LaurentPoly.from_mapping(terms)


def laurent_embed(p: PositivePart, basis: Iterable[int] = ()) -> LaurentPoly:
    """Send e_r (d_r) to the monomial of r's exponent vector; ``basis`` may add primes."""
    mapping = {factor_positive(r): c for r, c in p.terms}
    return LaurentPoly.from_mapping(mapping, basis)


def _polynomial_part(poly: LaurentPoly, basis: Sequence[int]) -> Tuple[Dict[Tuple[int, ...], Fraction], Tuple[int, ...]]:
    lows = poly.with_basis(basis).min_exponents()
    shifted = {
        tuple(e - low for e, low in zip(v.as_tuple(basis), lows)): c for v, c in poly.terms
    }
    return shifted, lows


def _to_vector(exponents: Sequence[int], basis: Sequence[int]) -> ExponentVector:
    return ExponentVector.from_mapping(dict(zip(basis, exponents)))


def exact_divide(numerator: LaurentPoly, divisor: LaurentPoly) -> Optional[LaurentPoly]:
    """Quotient q with ``divisor * q == numerator``, or None when none exists.

    Both sides are shifted into the polynomial ring by their lowest exponents; the
    shifted divisor then has no monomial factor, so Laurent divisibility is
    polynomial divisibility, decided by single-divisor division in grlex order.
    """
    if divisor.is_zero():
        raise DomainError("division by the zero Laurent polynomial")
    basis = tuple(sorted(set(numerator.basis) | set(divisor.basis)))
    if numerator.is_zero():
        return LaurentPoly.from_mapping({}, basis)
    remainder, n_low = _polynomial_part(numerator, basis)
    shifted_divisor, d_low = _polynomial_part(divisor, basis)
    lead, lead_coeff = max(shifted_divisor.items(), key=lambda term: _grlex_key(term[0]))
    quotient: Dict[Tuple[int, ...], Fraction] = {}
    while remainder:
        top = max(remainder, key=_grlex_key)
        step = tuple(a - b for a, b in zip(top, lead))
        if any(e < 0 for e in step):
            logging.debug(f"exact division: remainder term at {top}, not divisible")
            return None
        factor = remainder[top] / lead_coeff
        quotient[step] = quotient.get(step, Fraction(0)) + factor
        for exponents, c in shifted_divisor.items():
            key = tuple(a + b for a, b in zip(exponents, step))
            updated = remainder.get(key, Fraction(0)) - factor * c
            if updated:
                remainder[key] = updated
            else:
                remainder.pop(key, None)
    offset = tuple(a - b for a, b in zip(n_low, d_low))
    return LaurentPoly.from_mapping(
        {
            _to_vector([e + o for e, o in zip(exponents, offset)], basis): c
            for exponents, c in quotient.items()
        },
        basis,
    )


def divides_brute(numerator: LaurentPoly, divisor: LaurentPoly, bound: int) -> Optional[LaurentPoly]:
    """Independent check of :func:`exact_divide` by an exact linear solve.

    The quotient support is searched in the box between the lowest and highest
    exponent differences of numerator and divisor, widened by ``bound``.
    """
    if divisor.is_zero():
        raise DomainError("division by the zero Laurent polynomial")
    basis = tuple(sorted(set(numerator.basis) | set(divisor.basis)))
    if numerator.is_zero():
        return LaurentPoly.from_mapping({}, basis)
    numerator, divisor = numerator.with_basis(basis), divisor.with_basis(basis)
    ranges = [
        range(n_low - d_low - bound, n_high - d_high + bound + 1)
        for n_low, d_low, n_high, d_high in zip(
            numerator.min_exponents(),
            divisor.min_exponents(),
            numerator.max_exponents(),
            divisor.max_exponents(),
        )
    ]
    if any(len(r) == 0 for r in ranges):
        return None
    unknowns = list(itertools.product(*ranges))
    column = {exponents: index for index, exponents in enumerate(unknowns)}
    divisor_terms = [(v.as_tuple(basis), c) for v, c in divisor.terms]
    rows: Dict[Tuple[int, ...], Dict[int, Fraction]] = {}
    for exponents in unknowns:
        for d, c in divisor_terms:
            key = tuple(a + b for a, b in zip(exponents, d))
            rows.setdefault(key, {})[column[exponents]] = c
    targets = {v.as_tuple(basis): c for v, c in numerator.terms}
    if any(key not in rows for key in targets):
        return None
    keys = list(rows)
    solution = solve_linear_exact(
        [rows[key] for key in keys],
        [targets.get(key, Fraction(0)) for key in keys],
        n_cols=len(unknowns),
    )
    if not solution.feasible:
        return None
    return LaurentPoly.from_mapping(
        {_to_vector(exponents, basis): value for exponents, value in zip(unknowns, solution.values)},
        basis,
    )


def is_monomial(p: LaurentPoly) -> Optional[Tuple[Fraction, Fraction]]:
    """``(c, r)`` when ``p = c * y^vec(r)``."""
    if len(p.terms) != 1:
        return None
    vector, c = p.terms[0]
    return c, vector.to_rational()


def rational_roots(poly: LaurentPoly) -> List[Fraction]:
    """Nonzero rational roots of a Laurent polynomial in at most one variable."""
    if poly.is_zero():
        raise DomainError("every point is a root of the zero polynomial")
    variables = sorted({p for v, _ in poly.terms for p in v.primes})
    if not variables:
        return []
    if len(variables) > 1:
        raise DomainError("rational_roots needs a univariate polynomial")
    (prime,) = variables
    low = min(v.exponent(prime) for v, _ in poly.terms)
    coefficients = {v.exponent(prime) - low: c for v, c in poly.terms}
    common = math.lcm(*(c.denominator for c in coefficients.values()))
    constant = abs(int(coefficients[0] * common))
    leading = abs(int(coefficients[max(coefficients)] * common))
    roots = set()
    for numerator in divisors(constant):
        for denominator in divisors(leading):
            for candidate in (Fraction(numerator, denominator), Fraction(-numerator, denominator)):
                if sum(c * candidate**e for e, c in coefficients.items()) == 0:
                    roots.add(candidate)
    return sorted(roots)


def positive_from_laurent(poly: LaurentPoly, parity: Parity) -> PositivePart:
    """Inverse of :func:`laurent_embed`."""
    return PositivePart.from_mapping({v.to_rational(): c for v, c in poly.terms}, parity)


def to_laurent(value) -> LaurentPoly:
    if isinstance(value, LaurentPoly):
        return value
    if isinstance(value, str):
        return parse_laurent(value)
    raise LaurentSyntaxError(f"cannot read {value!r} as a Laurent polynomial")


ZERO_COMPONENT = "zero-component"


def to_component_quotient(value) -> Optional[LaurentPoly]:
    if value is None or value == ZERO_COMPONENT:
        return None
    return to_laurent(value)


def format_component_quotient(value: Optional[LaurentPoly]) -> str:
    return ZERO_COMPONENT if value is None else value.format()


Laurent = Annotated[
    LaurentPoly,
    PlainValidator(to_laurent),
    PlainSerializer(lambda value: value.format(), return_type=str),
    WithJsonSchema({"type": "string", "examples": ["1*y2^1 - 2"]}),
]

ComponentQuotient = Annotated[
    Optional[LaurentPoly],
    PlainValidator(to_component_quotient),
    PlainSerializer(format_component_quotient, return_type=str),
    WithJsonSchema({"type": "string", "examples": ["1", "1*y2^1", ZERO_COMPONENT]}),
]
