"""Difference schemes and their classical analysis.

A scheme ``sum A_i f(x + a_i h)`` is stored as its (coefficient, node) terms.
Wherever a component may vanish (parity parts, sums) the zero scheme is None.
"""

import logging
import math
import re
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    computed_field,
    field_validator,
    model_serializer,
    model_validator,
)

from grd.exact import RATIONAL_PATTERN, Rational, format_rational, solve_linear_exact
from grd.exceptions import (
    DomainError,
    DuplicateNodeError,
    EmptySchemeError,
    InputError,
    NotGeneralizedRiemannError,
    SchemeSyntaxError,
    UnknownCatalogEntryError,
)


CATALOG_PREFIX = "catalog:"

_RATIONAL_AT = re.compile(RATIONAL_PATTERN)
_CATALOG_REF = re.compile(r"^catalog:([a-z_][a-z0-9_]*)(?:\((.*)\))?$")


def _normalize_terms(pairs: Iterable[Tuple[Fraction, Fraction]]) -> Tuple[Tuple[Fraction, Fraction], ...]:
    seen = set()
    kept = []
    for coeff, node in pairs:
        coeff, node = Fraction(coeff), Fraction(node)
        if node in seen:
            raise DuplicateNodeError(f"duplicate node {format_rational(node)}")
        seen.add(node)
        if coeff != 0:
            kept.append((coeff, node))
    if not kept:
        raise EmptySchemeError("a scheme needs at least one nonzero term")
    return tuple(sorted(kept, key=lambda term: term[1], reverse=True))


class DiffScheme(BaseModel):
    """The difference ``sum A_i f(x + a_i h)`` with distinct nodes, nodes descending."""

    model_config = ConfigDict(frozen=True)

    terms: Tuple[Tuple[Rational, Rational], ...] = Field(
        description="(coefficient, node) pairs, nonzero coefficients, nodes descending"
    )

    @model_validator(mode="before")
    @classmethod
    def accept_grammar(cls, data):
        if isinstance(data, str):
            return {"terms": _scan_terms(data)}
        if isinstance(data, (list, tuple)):
            return {"terms": data}
        return data

    @field_validator("terms")
    @classmethod
    def validate_terms(cls, terms):
        return _normalize_terms(terms)

    @model_serializer
    def serialize(self) -> str:
        return self.format()

    @classmethod
    def from_terms(cls, pairs: Iterable[Tuple[Fraction, Fraction]]) -> "DiffScheme":
        return cls(terms=_normalize_terms(pairs))

    @property
    def nodes(self) -> Tuple[Fraction, ...]:
        return tuple(node for _, node in self.terms)

    @property
    def size(self) -> int:
        return len(self.terms)

    def as_dict(self) -> Dict[Fraction, Fraction]:
        return {node: coeff for coeff, node in self.terms}

    def coefficient_at(self, node: Fraction) -> Fraction:
        return self.as_dict().get(Fraction(node), Fraction(0))

    def format(self) -> str:
        return ", ".join(
            f"{format_rational(coeff)}@{format_rational(node)}" for coeff, node in self.terms
        )

    def __str__(self):
        return self.format()


def build_scheme(coefficients: Dict[Fraction, Fraction]) -> Optional[DiffScheme]:
    """Scheme from a node -> coefficient map; None when every coefficient is 0."""
    pairs = [(c, node) for node, c in coefficients.items() if c != 0]
    if not pairs:
        return None
    return DiffScheme.from_terms(pairs)


def _read_rational(text: str, pos: int) -> Tuple[Fraction, int]:
    match = _RATIONAL_AT.match(text, pos)
    if match is None:
        raise SchemeSyntaxError("expected a rational", pos)
    numerator, _, denominator = match.group(0).partition("/")
    if denominator and int(denominator) == 0:
        raise SchemeSyntaxError("zero denominator", pos)
    return Fraction(int(numerator), int(denominator) if denominator else 1), match.end()


def _skip_spaces(text: str, pos: int) -> int:
    while pos < len(text) and text[pos].isspace():
        pos += 1
    return pos


def _scan_terms(text: str) -> List[Tuple[Fraction, Fraction]]:
    pos = _skip_spaces(text, 0)
    if pos == len(text):
        raise EmptySchemeError("empty scheme")
    terms = []
    while True:
        coeff, pos = _read_rational(text, pos)
        if pos >= len(text) or text[pos] != "@":
            raise SchemeSyntaxError("expected '@'", pos)
        node, pos = _read_rational(text, pos + 1)
        terms.append((coeff, node))
        after = _skip_spaces(text, pos)
        if after == len(text):
            return terms
        if text[after] == ",":
            pos = _skip_spaces(text, after + 1)
        elif after > pos:
            pos = after
        else:
            raise SchemeSyntaxError(f"unexpected {text[after]!r}", after)


def parse_scheme(text: str) -> DiffScheme:
    """Parse ``term (("," | whitespace) term)*`` with ``term := rational "@" rational``."""
    return DiffScheme.from_terms(_scan_terms(text))


def moment(s: DiffScheme, j: int) -> Fraction:
    return sum((coeff * node**j for coeff, node in s.terms), Fraction(0))


class GrdProfile(BaseModel):
    """Moments of a scheme and whether they are the Vandermonde conditions of some order."""

    first_nonzero_index: Optional[int] = Field(
        default=None, description="Least j with a nonzero moment, None for the zero scheme"
    )
    first_moment_value: Optional[Rational] = Field(
        default=None, description="The moment at first_nonzero_index"
    )
    is_grd: bool = Field(default=False, description="Whether the first moment equals j0!")
    order: Optional[int] = Field(default=None, description="Order n when is_grd")
    excess: Optional[int] = Field(default=None, description="m - (n + 1) when is_grd")
    moments: List[Rational] = Field(default_factory=list, description="Moments j = 0..m-1")

    @model_validator(mode="after")
    def validate_grd(self):
        if self.is_grd:
            if self.order != self.first_nonzero_index:
                raise ValueError("order must equal the first nonzero moment index")
            if self.first_moment_value != math.factorial(self.order):
                raise ValueError("a GRD has first nonzero moment n!")
            if self.excess is None or self.excess < 0:
                raise ValueError("a GRD has non-negative excess")
        elif self.order is not None or self.excess is not None:
            raise ValueError("order and excess are only defined for GRDs")
        return self

    @property
    def scalar(self) -> Optional[Fraction]:
        """c / j0!, the multiple of a GRD of order j0 this scheme is."""
        if self.first_nonzero_index is None:
            return None
        return self.first_moment_value / math.factorial(self.first_nonzero_index)


def grd_profile(s: Optional[DiffScheme]) -> GrdProfile:
    if s is None:
        return GrdProfile()
    moments = [moment(s, j) for j in range(s.size)]
    j0 = next(j for j, value in enumerate(moments) if value != 0)
    c = moments[j0]
    if c == math.factorial(j0):
        return GrdProfile(
            first_nonzero_index=j0,
            first_moment_value=c,
            is_grd=True,
            order=j0,
            excess=s.size - (j0 + 1),
            moments=moments,
        )
    return GrdProfile(first_nonzero_index=j0, first_moment_value=c, moments=moments)


def require_grd(s: DiffScheme) -> GrdProfile:
    profile = grd_profile(s)
    if not profile.is_grd:
        raise NotGeneralizedRiemannError(
            f"{s} is not a generalized Riemann difference "
            f"(first nonzero moment j={profile.first_nonzero_index} is "
            f"{format_rational(profile.first_moment_value)})"
        )
    return profile


def dilate(s: DiffScheme, r: Fraction) -> DiffScheme:
    r = Fraction(r)
    if r == 0:
        raise DomainError("dilation by 0")
    return DiffScheme.from_terms((coeff, node * r) for coeff, node in s.terms)


def scale(s: DiffScheme, c: Fraction) -> DiffScheme:
    c = Fraction(c)
    if c == 0:
        raise DomainError("scaling a scheme by 0")
    return DiffScheme.from_terms((coeff * c, node) for coeff, node in s.terms)


def scaling(s: DiffScheme, t: Fraction) -> DiffScheme:
    """Dilate by t and divide by t^n; again a GRD of order n."""
    n = require_grd(s).order
    t = Fraction(t)
    return scale(dilate(s, t), t ** (-n))


def reflect(s: DiffScheme) -> DiffScheme:
    return dilate(s, -1)


def combine(*parts: Optional[DiffScheme]) -> Optional[DiffScheme]:
    coefficients: Dict[Fraction, Fraction] = {}
    for part in parts:
        if part is None:
            continue
        for coeff, node in part.terms:
            coefficients[node] = coefficients.get(node, Fraction(0)) + coeff
    return build_scheme(coefficients)


class ParitySplit(BaseModel):
    """Even and odd components of a scheme, aligned to the order parity when it has one."""

    even: Optional[DiffScheme] = Field(default=None, description="Even component")
    odd: Optional[DiffScheme] = Field(default=None, description="Odd component")
    order: Optional[int] = Field(
        default=None, description="Order of the scheme when it is a GRD"
    )

    @computed_field
    @property
    def epsilon_part(self) -> Optional[DiffScheme]:
        if self.order is None:
            return None
        return self.even if self.order % 2 == 0 else self.odd

    @computed_field
    @property
    def epsilon_prime_part(self) -> Optional[DiffScheme]:
        if self.order is None:
            return None
        return self.odd if self.order % 2 == 0 else self.even

    def component(self, even: bool) -> Optional[DiffScheme]:
        return self.even if even else self.odd


def parity_split(s: DiffScheme) -> ParitySplit:
    coefficients = s.as_dict()
    even: Dict[Fraction, Fraction] = {}
    odd: Dict[Fraction, Fraction] = {}
    for node in set(coefficients) | {-node for node in coefficients}:
        here = coefficients.get(node, Fraction(0))
        mirrored = coefficients.get(-node, Fraction(0))
        if node == 0:
            even[node] = here
            continue
        even[node] = (here + mirrored) / 2
        odd[node] = (here - mirrored) / 2
    profile = grd_profile(s)
    return ParitySplit(
        even=build_scheme(even),
        odd=build_scheme(odd),
        order=profile.order if profile.is_grd else None,
    )


class ParityStructure(BaseModel):
    """Moment profiles of the parity components of a GRD of order n.

    The component of the order's parity is itself a GRD of order n; the other
    one is zero or a multiple of a GRD of strictly higher order.
    """

    model_config = ConfigDict(populate_by_name=True)

    order: int = Field(description="Order n of the scheme")
    epsilon_profile: GrdProfile = Field(description="Profile of the component of n's parity")
    epsilon_prime_profile: Optional[GrdProfile] = Field(
        default=None, description="Profile of the other component, None when it is zero"
    )
    epsilon_prime_scalar: Optional[Rational] = Field(
        default=None,
        description="c/j0! for the other component: the multiple of a GRD of order j0 it is",
    )
    structure_holds: bool = Field(
        alias="theorem4_holds",
        description="Parity component is a GRD of order n, the other vanishes to order > n",
    )


def parity_structure(s: DiffScheme) -> ParityStructure:
    n = require_grd(s).order
    split = parity_split(s)
    epsilon = grd_profile(split.epsilon_part)
    epsilon_prime = split.epsilon_prime_part
    prime_profile = grd_profile(epsilon_prime) if epsilon_prime is not None else None
    holds = epsilon.is_grd and epsilon.order == n
    if prime_profile is not None:
        holds = holds and prime_profile.first_nonzero_index > n
    if not holds:
        logging.warning(f"parity structure fails for {s}")
    return ParityStructure(
        order=n,
        epsilon_profile=epsilon,
        epsilon_prime_profile=prime_profile,
        epsilon_prime_scalar=prime_profile.scalar if prime_profile is not None else None,
        structure_holds=holds,
    )


def grd_from_nodes(
    nodes: Sequence[Fraction], n: int, free_values: Optional[Sequence[Fraction]] = None
) -> DiffScheme:
    """Solve the Vandermonde conditions of order n on the given nodes.

    With more than n + 1 nodes the free coefficients are 0, or ``free_values``.
    """
    nodes = sorted((Fraction(a) for a in nodes), reverse=True)
    if len(nodes) != len(set(nodes)):
        raise DuplicateNodeError("nodes must be distinct")
    if n < 0:
        raise DomainError(f"order must be non-negative, got {n}")
    if len(nodes) <= n:
        raise DomainError(f"order {n} needs at least {n + 1} nodes, got {len(nodes)}")
    rows = [[a**j for a in nodes] for j in range(n + 1)]
    rhs = [math.factorial(n) if j == n else 0 for j in range(n + 1)]
    solution = solve_linear_exact(rows, rhs, free_values=free_values)
    assert solution.feasible, "Vandermonde conditions on distinct nodes are solvable"
    scheme = build_scheme(dict(zip(nodes, solution.values)))
    assert scheme is not None
    return scheme


def _binomial_scheme(n: int, shift: Fraction) -> DiffScheme:
    return DiffScheme.from_terms(
        ((-1) ** k * math.comb(n, k), shift - k) for k in range(n + 1)
    )


def _natural(value: Fraction, name: str) -> int:
    if value.denominator != 1 or value < 1:
        raise InputError(f"{name}() needs a positive integer order, got {format_rational(value)}")
    return int(value)


def _riemann(n: Fraction) -> DiffScheme:
    n = _natural(n, "riemann")
    return _binomial_scheme(n, Fraction(n))


def _symmetric(n: Fraction) -> DiffScheme:
    n = _natural(n, "symmetric")
    return _binomial_scheme(n, Fraction(n, 2))


def _symmetric_centered_1() -> DiffScheme:
    return DiffScheme.from_terms([(Fraction(1, 2), 1), (Fraction(-1, 2), -1)])


def _theorem1(a: Fraction, r: Fraction) -> DiffScheme:
    if a == 0 or r == 0:
        raise InputError("theorem1(A, r) needs A != 0 and r != 0")
    coefficients: Dict[Fraction, Fraction] = {}
    for coeff, node in [(a / 2, r), (a / 2, -r), (-a, 0), (Fraction(1, 2), 1), (Fraction(-1, 2), -1)]:
        coefficients[Fraction(node)] = coefficients.get(Fraction(node), Fraction(0)) + coeff
    scheme = build_scheme(coefficients)
    if scheme is None:
        raise InputError("theorem1(A, r) vanishes for these parameters")
    return scheme


def _example3iii() -> DiffScheme:
    return parse_scheme("1/2@2, -1@1, 1@-1, -1/2@-2")


CATALOG: Dict[str, Tuple[Callable[..., DiffScheme], Tuple[str, ...], str]] = {
    "riemann": (_riemann, ("n",), "forward Riemann difference of order n"),
    "symmetric": (_symmetric, ("n",), "symmetric Riemann difference of order n, nodes n/2 - k"),
    "symmetric_centered_1": (
        _symmetric_centered_1,
        (),
        "first symmetric difference on nodes 1 and -1",
    ),
    "theorem1": (
        _theorem1,
        ("A", "r"),
        "first order difference equivalent to ordinary differentiation",
    ),
    "example3iii": (
        _example3iii,
        (),
        "third order odd difference on nodes 2, 1, -1, -2",
    ),
}


def catalog(name: str, params: Sequence[Fraction] = ()) -> DiffScheme:
    if name not in CATALOG:
        raise UnknownCatalogEntryError(f"unknown catalog entry {name!r}")
    builder, arity, _ = CATALOG[name]
    if len(params) != len(arity):
        raise InputError(f"{name} takes {len(arity)} parameter(s), got {len(params)}")
    return builder(*(Fraction(p) for p in params))


def parse_catalog_ref(text: str) -> Tuple[str, List[Fraction]]:
    """Split ``catalog:name(p, q)`` into its name and rational parameters."""
    match = _CATALOG_REF.match(text.strip())
    if match is None:
        raise InputError(f"invalid catalog reference {text!r}")
    name, args = match.groups()
    params = []
    if args is not None and args.strip():
        start = len(CATALOG_PREFIX) + len(name) + 1
        for token in args.split(","):
            stripped = token.strip()
            if not _RATIONAL_AT.fullmatch(stripped):
                raise SchemeSyntaxError(f"invalid catalog parameter {stripped!r}", start)
            value, _ = _read_rational(stripped, 0)
            params.append(value)
            start += len(token) + 1
    return name, params


def resolve_scheme(text: str) -> DiffScheme:
    """Scheme literal or ``catalog:`` reference."""
    if text.strip().startswith(CATALOG_PREFIX):
        name, params = parse_catalog_ref(text)
        return catalog(name, params)
    return parse_scheme(text)
