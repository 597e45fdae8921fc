"""Implication and equivalence of generalized Riemann derivatives.

For GRDs of equal order, A-differentiability implies B-differentiability exactly
when each parity component of B lies in the principal ideal generated by the
matching component of A. Every positive verdict carries the Laurent quotients
that prove it; equivalence additionally extracts the scaling constants.
"""

import logging
from enum import Enum
from fractions import Fraction
from typing import Dict, Optional, Tuple

from pydantic import BaseModel, Field, model_validator

from grd.algebra import (
    ComponentQuotient,
    LaurentPoly,
    Parity,
    exact_divide,
    is_monomial,
    laurent_embed,
    parity_project,
    positive_from_laurent,
    scheme_from_positive,
    to_algebra,
)
from grd.exact import Rational
from grd.exceptions import DomainError
from grd.schemes import (
    DiffScheme,
    combine,
    dilate,
    parity_split,
    require_grd,
    scale,
    scaling,
)


class Reason(str, Enum):
    """Why a verdict came out the way it did."""

    OK = "ok"
    ORDER_GAP = "order-gap"
    EVEN_NOT_DIVISIBLE = "even-part-not-divisible"
    ODD_NOT_DIVISIBLE = "odd-part-not-divisible"
    ZERO_VS_NONZERO = "zero-vs-nonzero-component"

    @classmethod
    def not_divisible(cls, parity: Parity) -> "Reason":
        return cls.EVEN_NOT_DIVISIBLE if parity is Parity.EVEN else cls.ODD_NOT_DIVISIBLE


class Certificate(BaseModel):
    """Quotients gamma with consequent component = gamma * antecedent component."""

    epsilon_parity: Parity = Field(description="Parity of the order")
    epsilon_quotient: ComponentQuotient = Field(
        description="Quotient of the components of the order's parity"
    )
    epsilon_prime_quotient: ComponentQuotient = Field(
        description="Quotient of the components of the other parity"
    )

    def quotient(self, parity: Parity) -> Optional[LaurentPoly]:
        if parity is self.epsilon_parity:
            return self.epsilon_quotient
        return self.epsilon_prime_quotient


class ImplicationVerdict(BaseModel):
    holds: bool = Field(description="Whether antecedent-differentiability implies the consequent's")
    reason: Reason = Field(description="Reason for the verdict")
    order: Optional[int] = Field(default=None, description="Common order, None on an order gap")
    antecedent_order: int = Field(description="Order of the antecedent")
    consequent_order: int = Field(description="Order of the consequent")
    failed_parity: Optional[Parity] = Field(
        default=None, description="Parity component where the ideal inclusion fails"
    )
    certificate: Optional[Certificate] = Field(
        default=None, description="Laurent quotients, present when the implication holds"
    )

    @model_validator(mode="after")
    def validate_certificate(self):
        if self.holds != (self.reason is Reason.OK):
            raise ValueError("a verdict holds exactly when its reason is ok")
        if self.holds != (self.certificate is not None):
            raise ValueError("certificates accompany exactly the verdicts that hold")
        return self


class EquivalenceConstants(BaseModel):
    """a^eps = scaling(b^eps, s) and a^eps' = A * dilate(b^eps', r)."""

    A: Optional[Rational] = Field(default=None, description="Scalar of the eps' quotient")
    r: Optional[Rational] = Field(default=None, description="Dilation of the eps' quotient")
    s: Rational = Field(description="Scaling of the eps quotient")

    @model_validator(mode="after")
    def validate_pair(self):
        if (self.A is None) != (self.r is None):
            raise ValueError("A and r are either both present or both absent")
        if self.s <= 0 or (self.r is not None and self.r <= 0):
            raise ValueError("dilation points are positive")
        return self


class EquivalenceVerdict(BaseModel):
    holds: bool = Field(description="Whether the two derivatives are equivalent")
    reason: Reason = Field(description="Reason for the verdict")
    order: Optional[int] = Field(default=None, description="Common order, None on an order gap")
    constants: Optional[EquivalenceConstants] = Field(
        default=None, description="Constants relating the two schemes when equivalent"
    )

    @model_validator(mode="after")
    def validate_constants(self):
        if self.holds != (self.constants is not None):
            raise ValueError("constants accompany exactly the verdicts that hold")
        return self


class CanonicalForm(BaseModel):
    epsilon_canon: DiffScheme = Field(description="Component of the order's parity, max node 1")
    epsilon_prime_canon: Optional[DiffScheme] = Field(
        default=None, description="Other component, max node 1 and coefficient 1 at node 1"
    )
    order: int = Field(description="Order of the scheme")

    def representative(self) -> DiffScheme:
        """The GRD whose parity components are the canonical ones."""
        return combine(self.epsilon_canon, self.epsilon_prime_canon)


def decision_order(s: DiffScheme) -> int:
    """Order of a GRD admitted by the decision layer; order 0 is rejected."""
    n = require_grd(s).order
    if n == 0:
        raise DomainError(f"{s} has order 0; its node-0 term cannot be dropped")
    return n


def laurent_components(s: DiffScheme) -> Dict[Parity, LaurentPoly]:
    element = to_algebra(s)
    return {parity: laurent_embed(parity_project(element, parity)) for parity in Parity}


def _parities(n: int) -> Tuple[Parity, Parity]:
    epsilon = Parity.of_order(n)
    return epsilon, epsilon.opposite()


def implies(antecedent: DiffScheme, consequent: DiffScheme) -> ImplicationVerdict:
    n, m = decision_order(antecedent), decision_order(consequent)
    orders = {"antecedent_order": n, "consequent_order": m}
    if n != m:
        logging.debug(f"implies: order gap {n} vs {m}")
        return ImplicationVerdict(holds=False, reason=Reason.ORDER_GAP, **orders)
    base, target = laurent_components(antecedent), laurent_components(consequent)
    quotients: Dict[Parity, Optional[LaurentPoly]] = {}
    for parity in _parities(n):
        if target[parity].is_zero():
            quotients[parity] = None
            continue
        if base[parity].is_zero():
            return ImplicationVerdict(
                holds=False, reason=Reason.ZERO_VS_NONZERO, order=n, failed_parity=parity, **orders
            )
        quotient = exact_divide(target[parity], base[parity])
        if quotient is None:
            return ImplicationVerdict(
                holds=False,
                reason=Reason.not_divisible(parity),
                order=n,
                failed_parity=parity,
                **orders,
            )
        assert base[parity] * quotient == target[parity], "quotient does not re-multiply"
        quotients[parity] = quotient
    epsilon, epsilon_prime = _parities(n)
    return ImplicationVerdict(
        holds=True,
        reason=Reason.OK,
        order=n,
        certificate=Certificate(
            epsilon_parity=epsilon,
            epsilon_quotient=quotients[epsilon],
            epsilon_prime_quotient=quotients[epsilon_prime],
        ),
        **orders,
    )


def equivalent(a: DiffScheme, b: DiffScheme) -> EquivalenceVerdict:
    n, m = decision_order(a), decision_order(b)
    if n != m:
        return EquivalenceVerdict(holds=False, reason=Reason.ORDER_GAP)
    a_parts, b_parts = laurent_components(a), laurent_components(b)
    units: Dict[Parity, Optional[Tuple[Fraction, Fraction]]] = {}
    for parity in _parities(n):
        a_part, b_part = a_parts[parity], b_parts[parity]
        if a_part.is_zero() and b_part.is_zero():
            units[parity] = None
            continue
        if a_part.is_zero() or b_part.is_zero():
            return EquivalenceVerdict(holds=False, reason=Reason.ZERO_VS_NONZERO, order=n)
        forward = exact_divide(a_part, b_part)
        unit = is_monomial(forward) if forward is not None else None
        if unit is None:
            # the quotient of associates is a unit, so a failure shows in one direction
            backward = exact_divide(b_part, a_part)
            assert forward is None or backward is None
            return EquivalenceVerdict(holds=False, reason=Reason.not_divisible(parity), order=n)
        units[parity] = unit

    epsilon, epsilon_prime = _parities(n)
    c, s = units[epsilon]
    assert c == s ** (-n), f"eps quotient scalar {c} is not s^-n for s = {s}"
    b_split, a_split = parity_split(b), parity_split(a)
    recomposed = scaling(b_split.epsilon_part, s)
    constants = EquivalenceConstants(s=s)
    if units[epsilon_prime] is not None:
        big_a, r = units[epsilon_prime]
        constants = EquivalenceConstants(A=big_a, r=r, s=s)
        recomposed = combine(recomposed, scale(dilate(b_split.epsilon_prime_part, r), big_a))
    assert recomposed == combine(a_split.epsilon_part, a_split.epsilon_prime_part) == a
    logging.debug(f"equivalent: {a} ~ {b} with {constants}")
    return EquivalenceVerdict(holds=True, reason=Reason.OK, order=n, constants=constants)


def canonical_form(s: DiffScheme) -> CanonicalForm:
    n = decision_order(s)
    split = parity_split(s)
    epsilon = split.epsilon_part
    t = max(abs(node) for node in epsilon.nodes)
    epsilon_canon = scaling(epsilon, 1 / t)
    epsilon_prime_canon = None
    if split.epsilon_prime_part is not None:
        t_prime = max(abs(node) for node in split.epsilon_prime_part.nodes)
        dilated = dilate(split.epsilon_prime_part, 1 / t_prime)
        epsilon_prime_canon = scale(dilated, 1 / dilated.coefficient_at(1))
    return CanonicalForm(epsilon_canon=epsilon_canon, epsilon_prime_canon=epsilon_prime_canon, order=n)


def apply_certificate(antecedent: DiffScheme, certificate: Certificate) -> Optional[DiffScheme]:
    """Rebuild the consequent as the combination of dilates the certificate describes."""
    components = laurent_components(antecedent)
    parts = []
    for parity in Parity:
        quotient = certificate.quotient(parity)
        if quotient is None:
            continue
        product = positive_from_laurent(components[parity] * quotient, parity)
        parts.append(scheme_from_positive(product))
    return combine(*parts)
