from fastapi import APIRouter

from app.models.requests import OrderGapRequest, ProbeRequest, WitnessRequest
from grd.reports import WitnessReport, witness_report
from grd.schemes import resolve_scheme
from grd.witness import FunctionSpec, ProbeReport, probe, witness_order_gap


router = APIRouter(prefix="/witnesses", tags=["witnesses"])


@router.post("/construct", response_model=WitnessReport)
def construct_witness(request: WitnessRequest) -> WitnessReport:
    """Builds and verifies a witness directly at request, which can take a while.

    Use the ``/jobs`` queue to have a worker do it instead.
    """
    return witness_report(
        resolve_scheme(request.antecedent),
        resolve_scheme(request.consequent),
        scale_count=request.scale_count,
        window_cap=request.window_cap,
    )


@router.post("/probe", response_model=ProbeReport)
def probe_scheme(request: ProbeRequest) -> ProbeReport:
    return probe(resolve_scheme(request.scheme), request.function, request.sequence)


@router.post("/order-gap", response_model=FunctionSpec)
def order_gap(request: OrderGapRequest) -> FunctionSpec:
    return witness_order_gap(request.m, request.n)
