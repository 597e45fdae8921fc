from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

from grd.algebra import LaurentPoly, Parity, divides_brute, parse_laurent
from grd.classify import (
    Certificate,
    EquivalenceConstants,
    ImplicationVerdict,
    Reason,
    apply_certificate,
    canonical_form,
    decision_order,
    equivalent,
    implies,
    laurent_components,
)
from grd.exact import ExponentVector
from grd.exceptions import DomainError, NotGeneralizedRiemannError
from grd.schemes import (
    catalog,
    combine,
    dilate,
    grd_profile,
    parity_split,
    parse_scheme,
    resolve_scheme,
    scale,
    scaling,
)
from tests.strategies import grds, nonzero_rationals, positive_rationals


SYMMETRIC_3 = catalog("symmetric", [3])
EXAMPLE_3III = catalog("example3iii")
FORWARD_1 = catalog("riemann", [1])


def test_symmetric_does_not_imply_example3iii():
    verdict = implies(SYMMETRIC_3, EXAMPLE_3III)
    assert not verdict.holds
    assert verdict.reason is Reason.ODD_NOT_DIVISIBLE
    assert verdict.failed_parity is Parity.ODD
    assert verdict.order == 3
    assert verdict.certificate is None
    assert not implies(EXAMPLE_3III, SYMMETRIC_3).holds
    assert not equivalent(SYMMETRIC_3, EXAMPLE_3III).holds


def test_forward_difference_implies_theorem1():
    verdict = implies(FORWARD_1, catalog("theorem1", [1, 2]))
    assert verdict.holds
    assert verdict.reason is Reason.OK
    assert verdict.certificate.epsilon_parity is Parity.ODD
    assert verdict.certificate.epsilon_quotient == LaurentPoly.constant(1)
    assert verdict.certificate.epsilon_prime_quotient == parse_laurent("1*y2^1")
    assert apply_certificate(FORWARD_1, verdict.certificate) == catalog("theorem1", [1, 2])


def test_zero_component_quotient():
    verdict = implies(SYMMETRIC_3, scaling(SYMMETRIC_3, 2))
    assert verdict.holds
    assert verdict.certificate.epsilon_prime_quotient is None
    assert verdict.certificate.epsilon_quotient == parse_laurent("1/8*y2^1")
    dumped = verdict.model_dump(mode="json")
    assert dumped["certificate"]["epsilon_prime_quotient"] == "zero-component"
    assert ImplicationVerdict.model_validate(dumped).model_dump(mode="json") == dumped


@pytest.mark.parametrize("m, n", [(m, n) for m in range(1, 5) for n in range(1, 5) if m != n])
def test_order_gap(m, n):
    verdict = implies(catalog("riemann", [m]), catalog("riemann", [n]))
    assert not verdict.holds
    assert verdict.reason is Reason.ORDER_GAP
    assert (verdict.antecedent_order, verdict.consequent_order) == (m, n)
    assert verdict.order is None
    assert equivalent(catalog("riemann", [m]), catalog("riemann", [n])).reason is Reason.ORDER_GAP


def test_zero_versus_nonzero_component():
    verdict = implies(catalog("symmetric_centered_1"), FORWARD_1)
    assert not verdict.holds
    assert verdict.reason is Reason.ZERO_VS_NONZERO
    assert verdict.failed_parity is Parity.EVEN
    assert implies(FORWARD_1, catalog("symmetric_centered_1")).holds
    assert equivalent(catalog("symmetric_centered_1"), FORWARD_1).reason is Reason.ZERO_VS_NONZERO


@given(nonzero_rationals, positive_rationals)
def test_theorem1_is_equivalent_to_forward_difference(a, r):
    verdict = equivalent(catalog("theorem1", [a, r]), FORWARD_1)
    assert verdict.holds
    assert verdict.constants == EquivalenceConstants(A=a, r=r, s=1)
    assert canonical_form(catalog("theorem1", [a, r])) == canonical_form(FORWARD_1)


def test_canonical_form_of_forward_difference():
    form = canonical_form(FORWARD_1)
    assert form.epsilon_canon == parse_scheme("1/2@1, -1/2@-1")
    assert form.epsilon_prime_canon == parse_scheme("1@1, -2@0, 1@-1")
    assert form.order == 1
    assert form.representative() == parse_scheme("3/2@1, -2@0, 1/2@-1")


def test_canonical_form_of_odd_scheme():
    form = canonical_form(SYMMETRIC_3)
    assert form.epsilon_canon == scaling(SYMMETRIC_3, Fraction(2, 3))
    assert max(form.epsilon_canon.nodes) == 1
    assert form.epsilon_prime_canon is None


@pytest.mark.parametrize("n", [1, 2, 3])
@given(t=positive_rationals)
def test_symmetric_is_equivalent_to_its_scalings(n, t):
    s = catalog("symmetric", [n])
    verdict = equivalent(scaling(s, t), s)
    assert verdict.holds
    assert verdict.constants.s == t
    assert verdict.constants.A is None


@settings(max_examples=100)
@given(grds(orders=st.integers(min_value=1, max_value=3)))
def test_symmetric_is_not_equivalent_to_a_mixed_parity_grd(s):
    assume(parity_split(s).epsilon_prime_part is not None)
    symmetric = catalog("symmetric", [grd_profile(s).order])
    assert not equivalent(symmetric, s).holds
    verdict = implies(symmetric, s)
    assert not verdict.holds


def test_order_zero_is_rejected():
    with pytest.raises(DomainError, match="order 0"):
        implies(parse_scheme("1@0"), parse_scheme("1@0"))
    with pytest.raises(DomainError):
        decision_order(parse_scheme("1@1"))


def test_non_grd_is_rejected():
    with pytest.raises(NotGeneralizedRiemannError):
        implies(parse_scheme("2@1, -2@0"), FORWARD_1)
    with pytest.raises(NotGeneralizedRiemannError):
        canonical_form(parse_scheme("2@1, -2@0"))


@given(grds())
def test_implication_is_reflexive(s):
    verdict = implies(s, s)
    assert verdict.holds
    assert verdict.certificate.epsilon_quotient == LaurentPoly.constant(1)


def unit_transform(s, t, a, r):
    split = parity_split(s)
    transformed = scaling(split.epsilon_part, t)
    if split.epsilon_prime_part is not None:
        transformed = combine(transformed, scale(dilate(split.epsilon_prime_part, r), a))
    return transformed


@given(grds(), positive_rationals, nonzero_rationals, positive_rationals)
def test_canonical_form_is_a_unit_invariant(s, t, a, r):
    other = unit_transform(s, t, a, r)
    assert equivalent(s, other).holds
    assert equivalent(other, s).holds
    assert canonical_form(s) == canonical_form(other)


@given(grds())
def test_canonical_form_is_idempotent(s):
    form = canonical_form(s)
    assert canonical_form(form.representative()) == form
    assert equivalent(s, form.representative()).holds


@given(grds(orders=st.integers(min_value=1, max_value=3)), grds(orders=st.integers(min_value=1, max_value=3)))
def test_equivalence_is_mutual_implication(a, b):
    mutual = implies(a, b).holds and implies(b, a).holds
    assert equivalent(a, b).holds == mutual
    assert (canonical_form(a) == canonical_form(b)) == mutual


@given(grds(orders=st.integers(min_value=1, max_value=3)), grds(orders=st.integers(min_value=1, max_value=3)))
def test_certificates_are_sound(a, b):
    verdict = implies(a, b)
    if verdict.holds:
        assert apply_certificate(a, verdict.certificate) == b
    elif verdict.reason in (Reason.EVEN_NOT_DIVISIBLE, Reason.ODD_NOT_DIVISIBLE):
        components_a, components_b = laurent_components(a), laurent_components(b)
        parity = verdict.failed_parity
        assert divides_brute(components_b[parity], components_a[parity], 1) is None


@given(grds(orders=st.integers(min_value=1, max_value=3)), grds(orders=st.integers(min_value=1, max_value=3)), positive_rationals, positive_rationals)
def test_implication_is_scaling_invariant(a, b, t, u):
    assert implies(a, b).holds == implies(scaling(a, t), scaling(b, u)).holds


quotients = st.dictionaries(
    st.tuples(st.integers(min_value=-1, max_value=1), st.integers(min_value=-1, max_value=1)),
    st.integers(min_value=-2, max_value=2).filter(lambda c: c != 0),
    min_size=1,
    max_size=3,
).map(
    lambda terms: LaurentPoly.from_mapping(
        {ExponentVector.from_mapping({2: e2, 3: e3}): Fraction(c) for (e2, e3), c in terms.items()}
    )
)


def consequent_of(s, epsilon_quotient, epsilon_prime_quotient):
    """A GRD implied by s: multiply its components, normalized to keep the n-th moment."""
    n = grd_profile(s).order
    epsilon = Parity.of_order(n)
    value = epsilon_quotient.evaluate({2: 2**n, 3: 3**n})
    assume(value != 0)
    certificate = Certificate(
        epsilon_parity=epsilon,
        epsilon_quotient=epsilon_quotient * (1 / value),
        epsilon_prime_quotient=epsilon_prime_quotient,
    )
    return apply_certificate(s, certificate)


@settings(max_examples=50)
@given(grds(orders=st.integers(min_value=1, max_value=3)), quotients, quotients, quotients, quotients)
def test_implication_is_transitive(a, q1, q1_prime, q2, q2_prime):
    b = consequent_of(a, q1, q1_prime)
    assert grd_profile(b).order == grd_profile(a).order
    c = consequent_of(b, q2, q2_prime)
    assert implies(a, b).holds
    assert implies(b, c).holds
    assert implies(a, c).holds


def test_verdict_models_are_consistent():
    with pytest.raises(ValidationError):
        ImplicationVerdict(holds=True, reason=Reason.ORDER_GAP, antecedent_order=1, consequent_order=2)
    with pytest.raises(ValidationError):
        ImplicationVerdict(holds=True, reason=Reason.OK, order=1, antecedent_order=1, consequent_order=1)
    with pytest.raises(ValidationError):
        EquivalenceConstants(A=1, s=1)
    with pytest.raises(ValidationError):
        EquivalenceConstants(s=0)


def test_riemann_and_symmetric_second_differences():
    riemann, symmetric = resolve_scheme("catalog:riemann(2)"), resolve_scheme("1@1, -2@0, 1@-1")
    verdict = implies(riemann, symmetric)
    assert verdict.reason is Reason.EVEN_NOT_DIVISIBLE
    assert verdict.failed_parity is Parity.EVEN
    verdict = implies(symmetric, riemann)
    assert verdict.reason is Reason.ZERO_VS_NONZERO
    assert verdict.failed_parity is Parity.ODD
