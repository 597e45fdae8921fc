from fastapi import APIRouter

from app.models.requests import DivisionRequest, EquivalenceRequest, ImplicationRequest
from grd.classify import EquivalenceVerdict, ImplicationVerdict, equivalent, implies
from grd.reports import DivisionReport, division_report
from grd.schemes import resolve_scheme


router = APIRouter(prefix="/decisions", tags=["decisions"])


@router.post("/implies", response_model=ImplicationVerdict)
def decide_implication(request: ImplicationRequest) -> ImplicationVerdict:
    """Decides whether antecedent-differentiability implies consequent-differentiability.

    A false verdict is a regular response; only invalid input is an error.
    """
    return implies(resolve_scheme(request.antecedent), resolve_scheme(request.consequent))


@router.post("/equivalent", response_model=EquivalenceVerdict)
def decide_equivalence(request: EquivalenceRequest) -> EquivalenceVerdict:
    return equivalent(resolve_scheme(request.first), resolve_scheme(request.second))


@router.post("/divides", response_model=DivisionReport)
def divide(request: DivisionRequest) -> DivisionReport:
    return division_report(request.numerator, request.divisor, request.bound)
