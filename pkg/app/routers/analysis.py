from fastapi import APIRouter

from app.models.requests import SchemeRequest
from grd.classify import CanonicalForm, canonical_form
from grd.reports import (
    AnalysisReport,
    CatalogReport,
    ResolvedReference,
    SplitReport,
    analyze,
    catalog_report,
    split_report,
)
from grd.schemes import CATALOG_PREFIX, grd_profile, resolve_scheme


router = APIRouter(prefix="/schemes", tags=["schemes"])


@router.post("/analyze", response_model=AnalysisReport)
def analyze_scheme(request: SchemeRequest) -> AnalysisReport:
    """Moments, order, excess and parity structure of a scheme."""
    return analyze(resolve_scheme(request.scheme))


@router.post("/split", response_model=SplitReport)
def split_scheme(request: SchemeRequest) -> SplitReport:
    return split_report(resolve_scheme(request.scheme))


@router.post("/canonical", response_model=CanonicalForm)
def canonical_scheme(request: SchemeRequest) -> CanonicalForm:
    return canonical_form(resolve_scheme(request.scheme))


@router.get("/catalog", response_model=CatalogReport)
def list_catalog() -> CatalogReport:
    return catalog_report()


@router.get("/catalog/{reference}", response_model=ResolvedReference)
def resolve_catalog(reference: str) -> ResolvedReference:
    """Resolves a reference such as ``symmetric(3)`` to its scheme."""
    reference = f"{CATALOG_PREFIX}{reference}"
    scheme = resolve_scheme(reference)
    profile = grd_profile(scheme)
    return ResolvedReference(
        reference=reference, scheme=scheme, order=profile.order, excess=profile.excess
    )
