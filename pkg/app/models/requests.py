from typing import Optional

from pydantic import BaseModel, Field

from grd.algebra import Laurent
from grd.witness import DEFAULT_SCALE_COUNT, FunctionSpec, ProbeSequence


SCHEME_DESCRIPTION = 'Scheme literal such as "1@1, -1@0" or a reference such as "catalog:riemann(2)"'


class SchemeRequest(BaseModel):
    """Request model for the analyses of a single scheme."""

    scheme: str = Field(description=SCHEME_DESCRIPTION)


class ImplicationRequest(BaseModel):
    """Request model for deciding whether antecedent-differentiability implies the consequent's."""

    antecedent: str = Field(description=SCHEME_DESCRIPTION)
    consequent: str = Field(description=SCHEME_DESCRIPTION)


class EquivalenceRequest(BaseModel):
    first: str = Field(description=SCHEME_DESCRIPTION)
    second: str = Field(description=SCHEME_DESCRIPTION)


class DivisionRequest(BaseModel):
    numerator: Laurent = Field(description='Laurent polynomial such as "1*y2^2 - 4"')
    divisor: Laurent = Field(description='Laurent polynomial such as "1*y2^1 - 2"')
    bound: Optional[int] = Field(
        default=None, ge=0, description="Padding of the optional brute-force check"
    )


class WitnessRequest(ImplicationRequest):
    """Request model for a function differentiable for the antecedent but not the consequent."""

    scale_count: int = Field(
        default=DEFAULT_SCALE_COUNT, gt=0, description="Number of scales to verify"
    )
    window_cap: Optional[int] = Field(
        default=None, ge=0, description="Largest window radius to try"
    )


class ProbeRequest(SchemeRequest):
    function: FunctionSpec = Field(description="Function to probe")
    sequence: ProbeSequence = Field(
        default_factory=ProbeSequence, description="Step sequence h_j"
    )


class OrderGapRequest(BaseModel):
    m: int = Field(gt=1, description="Order the function must fail")
    n: int = Field(gt=0, description="Order the function must pass")
