"""Counterexample functions and exact difference-quotient probes.

A witness for a pair (S, T) is a function f with ``Delta_S f(0, h) = 0`` for every
h while ``Delta_T f(0, h) / h^n`` is unbounded along ``h = p^-m``. It lives on the
points ``sign * g * p^-m`` (g in the lattice H generated by the node primes,
m >= 1, p a prime outside H), so the scales fall in distinct cosets and the
conditions at different scales never interact.
"""

import itertools
import logging
import math
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from pydantic import BaseModel, Field, computed_field, model_validator

from grd.algebra import LaurentPoly, Parity, exact_divide, rational_roots
from grd.classify import Reason, decision_order, implies, laurent_components
from grd.exact import (
    ExponentVector,
    QuadExtValue,
    QuadField,
    Rational,
    factor_positive,
    smallest_prime_outside,
    solve_linear_exact,
    split_over_primes,
    valuation,
)
from grd.exceptions import CharacterSearchError, DomainError, WindowCapExceededError
from grd.schemes import DiffScheme, require_grd


DEFAULT_SCALE_COUNT = 8
# tried for every variable but the one solved for, in this order
CHARACTER_CANDIDATES = [
    Fraction(v) for v in (1, -1, 2, -2, Fraction(1, 2), Fraction(-1, 2), 3, -3, Fraction(1, 3), Fraction(-1, 3))
]


class WitnessStrategy(str, Enum):
    WINDOW = "window"
    CHARACTER = "character"


class WitnessEntry(BaseModel):
    sign: int = Field(description="Sign of the point, +1 or -1")
    exponents: Dict[int, int] = Field(description="Exponent vector of the lattice element g")
    value: Rational = Field(description="Value of f at sign * g * p^-m, for every m >= 1")

    @model_validator(mode="after")
    def validate_sign(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        return self

    @property
    def key(self) -> Tuple[int, ExponentVector]:
        return self.sign, ExponentVector.from_mapping(self.exponents)


class WitnessFunction(BaseModel):
    """Function supported on ``sign * g * p^-m`` for g in the lattice, m >= 1.

    Values come from ``inner_values``; off the table they are 0 for the window
    strategy and ``constant * chi(sign) * point^g`` for the character strategy.
    """

    strategy: WitnessStrategy = Field(description="How the values were obtained")
    scale_prime: int = Field(description="Prime p outside the lattice; scales are p^-m")
    scale_count: int = Field(gt=0, description="Number of scales M verified")
    window_radius: int = Field(ge=0, description="Constraint radius L")
    node_radius: int = Field(ge=0, description="Largest exponent norm of a node")
    order: int = Field(description="Order n of the consequent scheme")
    lattice: List[int] = Field(description="Primes generating the lattice H")
    parity: Optional[Parity] = Field(default=None, description="Character parity")
    point: Optional[Dict[int, Rational]] = Field(
        default=None, description="Character point, one nonzero value per lattice prime"
    )
    constant: Optional[Rational] = Field(default=None, description="Character normalization")
    inner_values: List[WitnessEntry] = Field(
        default_factory=list, description="Nonzero values on the window, norm <= L - node_radius"
    )

    @model_validator(mode="after")
    def validate_character(self):
        if self.strategy is WitnessStrategy.CHARACTER:
            if self.parity is None or self.point is None or self.constant is None:
                raise ValueError("a character witness needs parity, point and constant")
            if set(self.point) != set(self.lattice) or any(v == 0 for v in self.point.values()):
                raise ValueError("the character point assigns a nonzero value to every lattice prime")
        if self.scale_prime in self.lattice:
            raise ValueError("the scale prime must lie outside the lattice")
        return self

    def table(self) -> Dict[Tuple[int, ExponentVector], Fraction]:
        return {entry.key: entry.value for entry in self.inner_values}

    def locate(self, t: Fraction) -> Optional[Tuple[int, int, ExponentVector]]:
        """``(m, sign, g)`` with ``t = sign * g * p^-m``, or None off the support."""
        t = Fraction(t)
        if t == 0:
            return None
        m = -valuation(t, self.scale_prime)
        if m < 1:
            return None
        g = split_over_primes(abs(t) * Fraction(self.scale_prime) ** m, self.lattice)
        if g is None:
            return None
        return m, 1 if t > 0 else -1, g

    def character_value(self, sign: int, g: ExponentVector) -> Fraction:
        chi = 1 if self.parity is Parity.EVEN else sign
        value = self.constant * chi
        for prime, e in g.entries:
            value *= self.point[prime] ** e
        return value

    def value_at(
        self, t: Fraction, table: Optional[Dict[Tuple[int, ExponentVector], Fraction]] = None
    ) -> Fraction:
        located = self.locate(t)
        if located is None:
            return Fraction(0)
        _, sign, g = located
        table = self.table() if table is None else table
        if (sign, g) in table:
            return table[(sign, g)]
        if self.strategy is WitnessStrategy.CHARACTER:
            return self.character_value(sign, g)
        return Fraction(0)


class FunctionKind(str, Enum):
    POWER_ON_RATIONALS = "power_on_rationals"
    INDICATOR_OF_RATIONALS = "indicator_of_rationals"
    ZERO_ON_RATIONALS_IDENTITY_OFF = "zero_on_rationals_identity_off"
    ABS = "abs"
    POLYNOMIAL = "polynomial"
    WITNESS_TABLE = "witness_table"


class FunctionSpec(BaseModel):
    """A function on Q(sqrt 2) that can be evaluated exactly."""

    kind: FunctionKind = Field(description="Function family")
    power: Optional[int] = Field(default=None, ge=0, description="m for power_on_rationals")
    coefficients: Optional[List[Rational]] = Field(
        default=None, description="Polynomial coefficients, constant term first"
    )
    witness: Optional[WitnessFunction] = Field(default=None, description="Table for witness_table")

    @model_validator(mode="after")
    def validate_parameters(self):
        if self.kind is FunctionKind.POWER_ON_RATIONALS and self.power is None:
            raise ValueError("power_on_rationals needs a power")
        if self.kind is FunctionKind.POLYNOMIAL and self.coefficients is None:
            raise ValueError("polynomial needs coefficients")
        if self.kind is FunctionKind.WITNESS_TABLE and self.witness is None:
            raise ValueError("witness_table needs a witness")
        return self

    def describe(self) -> str:
        if self.kind is FunctionKind.POWER_ON_RATIONALS:
            return f"power_on_rationals({self.power})"
        if self.kind is FunctionKind.POLYNOMIAL:
            return f"polynomial({len(self.coefficients)} coefficients)"
        return self.kind.value


def eval_function(f: FunctionSpec, point: QuadExtValue) -> QuadExtValue:
    point = QuadExtValue.coerce(point)
    rational = point.is_rational
    if f.kind is FunctionKind.POWER_ON_RATIONALS:
        return point ** f.power if rational else QuadExtValue()
    if f.kind is FunctionKind.INDICATOR_OF_RATIONALS:
        return QuadExtValue(1 if rational else 0)
    if f.kind is FunctionKind.ZERO_ON_RATIONALS_IDENTITY_OFF:
        return QuadExtValue() if rational else point
    if f.kind is FunctionKind.ABS:
        return abs(point)
    if f.kind is FunctionKind.POLYNOMIAL:
        value = QuadExtValue()
        for c in reversed(f.coefficients):
            value = value * point + c
        return value
    if not rational:
        return QuadExtValue()
    return QuadExtValue(f.witness.value_at(point.rat))


class Branch(str, Enum):
    RATIONAL = "rational"
    SQRT2 = "sqrt2"
    SIGNED_ALTERNATING = "signed_alternating"


class ProbeSequence(BaseModel):
    branch: Branch = Field(default=Branch.RATIONAL, description="Shape of the h-sequence")
    ratio: Rational = Field(default=Fraction(1, 2), description="Common ratio, in (0, 1)")
    count: int = Field(default=8, ge=3, description="Number of samples")

    @model_validator(mode="after")
    def validate_ratio(self):
        if not 0 < self.ratio < 1:
            raise ValueError("ratio must lie strictly between 0 and 1")
        return self

    def points(self) -> List[QuadExtValue]:
        points = []
        for j in range(1, self.count + 1):
            h = QuadExtValue(self.ratio**j)
            if self.branch is Branch.SQRT2:
                h = h * QuadExtValue(0, 1)
            elif self.branch is Branch.SIGNED_ALTERNATING:
                h = h * (-1) ** j
            points.append(h)
        return points


class VerdictKind(str, Enum):
    CONVERGES = "converges"
    DIVERGES = "diverges"
    OSCILLATES = "oscillates"
    INCONCLUSIVE = "inconclusive"


class ProbeVerdict(BaseModel):
    kind: VerdictKind = Field(description="Verdict tag")
    value: Optional[QuadField] = Field(default=None, description="Limit for converges")
    branch_values: Optional[List[QuadField]] = Field(
        default=None, description="The two alternating values for oscillates"
    )

    @computed_field
    @property
    def tag(self) -> str:
        if self.kind is VerdictKind.CONVERGES:
            return f"converges({self.value})"
        if self.kind is VerdictKind.OSCILLATES:
            return f"oscillates({', '.join(str(v) for v in self.branch_values)})"
        return self.kind.value


class ProbeSample(BaseModel):
    h: QuadField = Field(description="Step")
    quotient: QuadField = Field(description="Delta f(0, h) / h^n")


class ProbeReport(BaseModel):
    order: int = Field(description="Order n of the probed scheme")
    function: str = Field(description="Probed function")
    samples: List[ProbeSample] = Field(description="Exact quotients along the sequence")
    verdict: ProbeVerdict = Field(description="Behaviour of the quotients")


def difference(s: DiffScheme, f: FunctionSpec, h: QuadExtValue, x: QuadExtValue = QuadExtValue()) -> QuadExtValue:
    return sum((eval_function(f, x + h * node) * coeff for coeff, node in s.terms), QuadExtValue())


def classify_quotients(quotients: Sequence[QuadExtValue]) -> ProbeVerdict:
    """Exact verdict over the sampled quotients; no thresholds."""
    tail = quotients[1:]
    if all(q == tail[0] for q in tail):
        return ProbeVerdict(kind=VerdictKind.CONVERGES, value=tail[0])
    if len(set(quotients)) == 2 and all(a != b for a, b in zip(quotients, quotients[1:])):
        return ProbeVerdict(kind=VerdictKind.OSCILLATES, branch_values=list(quotients[:2]))
    if all(quotients):
        ratios = {b / a for a, b in zip(quotients, quotients[1:])}
        if len(ratios) == 1 and abs(ratios.pop()) < 1:
            return ProbeVerdict(kind=VerdictKind.CONVERGES, value=QuadExtValue())
    if all(abs(a) < abs(b) for a, b in zip(quotients, quotients[1:])):
        return ProbeVerdict(kind=VerdictKind.DIVERGES)
    return ProbeVerdict(kind=VerdictKind.INCONCLUSIVE)


def probe(s: DiffScheme, f: FunctionSpec, sequence: ProbeSequence) -> ProbeReport:
    n = require_grd(s).order
    samples = [
        ProbeSample(h=h, quotient=difference(s, f, h) / h**n) for h in sequence.points()
    ]
    verdict = classify_quotients([sample.quotient for sample in samples])
    logging.debug(f"probe {s} with {f.describe()} on {sequence.branch.value}: {verdict.tag}")
    return ProbeReport(order=n, function=f.describe(), samples=samples, verdict=verdict)


def witness_order_gap(m: int, n: int) -> FunctionSpec:
    """x^m on the rationals, 0 elsewhere: order-n differentiable, not order-m."""
    if not m > n >= 1:
        raise DomainError(f"an order-gap witness needs m > n >= 1, got m={m}, n={n}")
    return FunctionSpec(kind=FunctionKind.POWER_ON_RATIONALS, power=m)


def lattice_ball(basis: Sequence[int], radius: int) -> Iterator[ExponentVector]:
    """Exponent vectors over ``basis`` with norm at most ``radius``."""
    if radius < 0:
        return

    def extend(index: int, remaining: int, prefix: Tuple[int, ...]):
        if index == len(basis):
            yield ExponentVector.from_mapping(dict(zip(basis, prefix)))
            return
        for e in range(-remaining, remaining + 1):
            yield from extend(index + 1, remaining - abs(e), prefix + (e,))

    yield from extend(0, radius, ())


def _signed_nodes(s: DiffScheme) -> List[Tuple[Fraction, int, ExponentVector]]:
    return [
        (coeff, 1 if node > 0 else -1, factor_positive(abs(node)))
        for coeff, node in s.terms
        if node != 0
    ]


class _Lattice(BaseModel):
    primes: List[int]
    node_radius: int
    scale_prime: int


def _lattice(*schemes: DiffScheme) -> _Lattice:
    vectors = [factor_positive(abs(node)) for s in schemes for node in s.nodes if node != 0]
    primes = sorted({p for v in vectors for p in v.primes})
    return _Lattice(
        primes=primes,
        node_radius=max((v.norm for v in vectors), default=0),
        scale_prime=smallest_prime_outside(primes),
    )


def _entries(values: Dict[Tuple[int, ExponentVector], Fraction]) -> List[WitnessEntry]:
    return [
        WitnessEntry(sign=sign, exponents=g.as_dict(), value=value)
        for (sign, g), value in sorted(values.items(), key=lambda item: (item[0][1].norm, item[0][1].entries, -item[0][0]))
        if value != 0
    ]


def _solve_window(
    antecedent: DiffScheme, consequent: DiffScheme, lattice: _Lattice, radius: int
) -> Optional[Dict[Tuple[int, ExponentVector], Fraction]]:
    inner = [
        (sign, g)
        for g in lattice_ball(lattice.primes, radius - lattice.node_radius)
        for sign in (1, -1)
    ]
    column = {key: index for index, key in enumerate(inner)}
    rows, rhs = [], []
    for g in lattice_ball(lattice.primes, radius):
        for sign in (1, -1):
            row: Dict[int, Fraction] = {}
            for coeff, node_sign, vector in _signed_nodes(antecedent):
                key = (sign * node_sign, vector + g)
                if key in column:
                    row[column[key]] = row.get(column[key], Fraction(0)) + coeff
            if row:
                rows.append(row)
                rhs.append(Fraction(0))
    normalization: Dict[int, Fraction] = {}
    for coeff, node_sign, vector in _signed_nodes(consequent):
        index = column[(node_sign, vector)]
        normalization[index] = normalization.get(index, Fraction(0)) + coeff
    rows.append(normalization)
    rhs.append(Fraction(1))
    solution = solve_linear_exact(rows, rhs, n_cols=len(inner))
    if not solution.feasible:
        return None
    return dict(zip(inner, solution.values))


def _find_character_point(
    vanishing: LaurentPoly, nonvanishing: LaurentPoly, primes: Sequence[int]
) -> Dict[int, Fraction]:
    """A nonzero rational point where ``vanishing`` is 0 and ``nonvanishing`` is not."""
    variables = sorted(set(vanishing.basis) | set(nonvanishing.basis))
    for solved in variables:
        others = [p for p in variables if p != solved]
        for values in itertools.product(CHARACTER_CANDIDATES, repeat=len(others)):
            assignment = dict(zip(others, values))
            reduced = vanishing.substitute(assignment)
            roots = CHARACTER_CANDIDATES if reduced.is_zero() else rational_roots(reduced)
            for root in roots:
                point = {**assignment, solved: root}
                if vanishing.evaluate(point) == 0 and nonvanishing.evaluate(point) != 0:
                    return {p: point.get(p, Fraction(1)) for p in primes}
    raise CharacterSearchError(
        f"no rational zero of {vanishing} off the zeros of {nonvanishing} among the candidate values"
    )


def _character_witness(
    lattice: _Lattice,
    parity: Parity,
    point: Dict[int, Fraction],
    constant: Fraction,
    order: int,
    scale_count: int,
) -> WitnessFunction:
    radius = 2 * lattice.node_radius + 1
    witness = WitnessFunction(
        strategy=WitnessStrategy.CHARACTER,
        scale_prime=lattice.scale_prime,
        scale_count=scale_count,
        window_radius=radius,
        node_radius=lattice.node_radius,
        order=order,
        lattice=lattice.primes,
        parity=parity,
        point=point,
        constant=constant,
    )
    values = {
        (sign, g): witness.character_value(sign, g)
        for g in lattice_ball(lattice.primes, radius - lattice.node_radius)
        for sign in (1, -1)
    }
    return witness.model_copy(update={"inner_values": _entries(values)})


def _parity_failures(
    base: Dict[Parity, LaurentPoly], target: Dict[Parity, LaurentPoly], n: int
) -> Dict[Parity, Reason]:
    """Failure reason of every parity whose target component is outside the ideal of the base."""
    failures: Dict[Parity, Reason] = {}
    epsilon = Parity.of_order(n)
    for parity in (epsilon, epsilon.opposite()):
        if target[parity].is_zero():
            continue
        if base[parity].is_zero():
            failures[parity] = Reason.ZERO_VS_NONZERO
        elif exact_divide(target[parity], base[parity]) is None:
            failures[parity] = Reason.not_divisible(parity)
    return failures


def witness_same_order(
    antecedent: DiffScheme,
    consequent: DiffScheme,
    scale_count: int = DEFAULT_SCALE_COUNT,
    window_cap: Optional[int] = None,
) -> WitnessFunction:
    """f with Delta_S f(0, h) = 0 for all h and Delta_T f(0, p^-m) = 1 for all m >= 1.

    A parity where the antecedent's component vanishes is tried first with the
    window solve; the character search runs on the not-divisible parities after.
    """
    verdict = implies(antecedent, consequent)
    if verdict.reason is Reason.ORDER_GAP:
        raise DomainError("witness_same_order needs schemes of equal order")
    if verdict.holds:
        raise DomainError(f"implication {antecedent} => {consequent} holds; no witness exists")
    n = verdict.order
    lattice = _lattice(antecedent, consequent)
    base, target = laurent_components(antecedent), laurent_components(consequent)
    failures = _parity_failures(base, target, n)
    logging.info(
        f"witness for {antecedent} =/=> {consequent}: "
        f"{', '.join(reason.value for reason in failures.values())}, "
        f"lattice {lattice.primes}, p={lattice.scale_prime}"
    )

    error: Optional[DomainError] = None
    if Reason.ZERO_VS_NONZERO in failures.values():
        first = 2 * lattice.node_radius + 1
        cap = window_cap if window_cap is not None else 2 * lattice.node_radius + 6
        for radius in range(first, cap + 1):
            values = _solve_window(antecedent, consequent, lattice, radius)
            if values is not None:
                logging.info(f"window solved at L={radius}")
                return WitnessFunction(
                    strategy=WitnessStrategy.WINDOW,
                    scale_prime=lattice.scale_prime,
                    scale_count=scale_count,
                    window_radius=radius,
                    node_radius=lattice.node_radius,
                    order=n,
                    lattice=lattice.primes,
                    inner_values=_entries(values),
                )
            logging.debug(f"window infeasible at L={radius}")
        error = WindowCapExceededError(f"no window witness up to L={cap}")
        logging.info(str(error))

    for parity, reason in failures.items():
        if reason is Reason.ZERO_VS_NONZERO:
            continue
        try:
            point = _find_character_point(base[parity], target[parity], lattice.primes)
        except CharacterSearchError as e:
            logging.info(f"{parity.value} part: {e}")
            error = e
            continue
        constant = 1 / target[parity].evaluate(point)
        logging.info(f"character point {point}, constant {constant}")
        return _character_witness(lattice, parity, point, constant, n, scale_count)
    raise error


def witness_order_drop(
    antecedent: DiffScheme, consequent: DiffScheme, scale_count: int = DEFAULT_SCALE_COUNT
) -> WitnessFunction:
    """Witness for order(T) = k < order(S): the character at y_p = p^k.

    There the parity-k component of a scheme evaluates to its k-th moment, which
    is 0 for S and k! for T.
    """
    n, k = decision_order(antecedent), decision_order(consequent)
    if not k < n:
        raise DomainError(f"an order-drop witness needs order(T) < order(S), got {k} and {n}")
    lattice = _lattice(antecedent, consequent)
    point = {p: Fraction(p) ** k for p in lattice.primes}
    return _character_witness(
        lattice, Parity.of_order(k), point, Fraction(1, math.factorial(k)), k, scale_count
    )


def build_witness(
    antecedent: DiffScheme,
    consequent: DiffScheme,
    scale_count: int = DEFAULT_SCALE_COUNT,
    window_cap: Optional[int] = None,
) -> FunctionSpec:
    """A function that is S-differentiable at 0 and not T-differentiable there."""
    n, m = decision_order(antecedent), decision_order(consequent)
    if n < m:
        return witness_order_gap(m, n)
    if n > m:
        witness = witness_order_drop(antecedent, consequent, scale_count)
    else:
        witness = witness_same_order(antecedent, consequent, scale_count, window_cap)
    return FunctionSpec(kind=FunctionKind.WITNESS_TABLE, witness=witness)


class WitnessFailure(BaseModel):
    h: Rational = Field(description="Step where the check failed")
    value: Rational = Field(description="Difference value found")
    check: str = Field(description="annihilation or normalization")


class WitnessCheck(BaseModel):
    passed: bool = Field(description="Whether every check passed")
    grid_points: int = Field(description="Steps h checked for annihilation")
    consequent_quotients: List[Rational] = Field(
        description="Delta_T f(0, p^-m) / p^-mn for m = 1..M"
    )
    failures: List[WitnessFailure] = Field(default_factory=list)
    structural_note: str = Field(description="Why steps off the grid need no check")


OFF_SUPPORT_NOTE = (
    "steps outside sign*g*p^-m (g in the lattice, m >= 1) put every nonzero node off the support"
)
STRUCTURAL_NOTES = {
    WitnessStrategy.WINDOW: f"{OFF_SUPPORT_NOTE}; steps with norm(g) > L + node radius only "
    "reach points beyond the table, where f is 0",
    WitnessStrategy.CHARACTER: f"{OFF_SUPPORT_NOTE}; on the support f is the character "
    "sign*g -> c*chi(sign)*z^g, and the antecedent's component vanishes at z, so every step "
    "cancels exactly",
}


def _rational_difference(s: DiffScheme, w: WitnessFunction, h: Fraction, table) -> Fraction:
    return sum((coeff * w.value_at(node * h, table) for coeff, node in s.terms), Fraction(0))


def verify_witness(w: WitnessFunction, antecedent: DiffScheme, consequent: DiffScheme) -> WitnessCheck:
    """Evaluate the witness directly on the whole verification grid."""
    table = w.table()
    n = require_grd(consequent).order
    failures: List[WitnessFailure] = []
    grid_points = 0
    for m in range(1, w.scale_count + 1):
        scale = Fraction(1, w.scale_prime**m)
        for g in lattice_ball(w.lattice, w.window_radius + w.node_radius):
            for sign in (1, -1):
                h = sign * g.to_rational() * scale
                grid_points += 1
                value = _rational_difference(antecedent, w, h, table)
                if value != 0:
                    failures.append(WitnessFailure(h=h, value=value, check="annihilation"))
    quotients = []
    for m in range(1, w.scale_count + 1):
        h = Fraction(1, w.scale_prime**m)
        value = _rational_difference(consequent, w, h, table)
        if value != 1:
            failures.append(WitnessFailure(h=h, value=value, check="normalization"))
        quotients.append(value / h**n)
    if failures:
        logging.warning(f"witness check: {len(failures)} failure(s), first at h={failures[0].h}")
    return WitnessCheck(
        passed=not failures,
        grid_points=grid_points,
        consequent_quotients=quotients,
        failures=failures,
        structural_note=STRUCTURAL_NOTES[w.strategy],
    )
