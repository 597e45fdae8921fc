"""Report records shared by the command line and the HTTP service."""

import json
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from grd.algebra import Laurent, Parity, divides_brute, exact_divide
from grd.classify import decision_order, laurent_components
from grd.schemes import (
    CATALOG,
    DiffScheme,
    GrdProfile,
    ParitySplit,
    ParityStructure,
    grd_profile,
    parity_split,
    parity_structure,
)
from grd.witness import (
    DEFAULT_SCALE_COUNT,
    Branch,
    FunctionSpec,
    ProbeReport,
    ProbeSequence,
    WitnessCheck,
    build_witness,
    probe,
    verify_witness,
)


SCHEMA_VERSION = 1


class AnalysisReport(BaseModel):
    scheme: DiffScheme = Field(description="Analyzed scheme")
    profile: GrdProfile = Field(description="Moments, order and excess")
    split: ParitySplit = Field(description="Even and odd components")
    structure: Optional[ParityStructure] = Field(
        default=None, description="Parity structure, present for GRDs of order >= 1"
    )


def analyze(s: DiffScheme) -> AnalysisReport:
    profile = grd_profile(s)
    structure = parity_structure(s) if profile.is_grd and profile.order >= 1 else None
    return AnalysisReport(scheme=s, profile=profile, split=parity_split(s), structure=structure)


class SplitReport(BaseModel):
    split: ParitySplit = Field(description="Even and odd components")
    even_laurent: Optional[Laurent] = Field(default=None, description="Laurent image of e*alpha")
    odd_laurent: Optional[Laurent] = Field(default=None, description="Laurent image of d*alpha")


def split_report(s: DiffScheme) -> SplitReport:
    if all(node == 0 for node in s.nodes):
        return SplitReport(split=parity_split(s))
    images = laurent_components(s)
    return SplitReport(
        split=parity_split(s),
        even_laurent=images[Parity.EVEN],
        odd_laurent=images[Parity.ODD],
    )


class DivisionReport(BaseModel):
    numerator: Laurent = Field(description="Dividend")
    divisor: Laurent = Field(description="Divisor")
    divisible: bool = Field(description="Whether the divisor divides the numerator")
    quotient: Optional[Laurent] = Field(default=None, description="Exact quotient")
    brute_bound: Optional[int] = Field(default=None, description="Padding of the brute-force check")
    brute_agrees: Optional[bool] = Field(
        default=None, description="Whether the bounded linear solve gives the same answer"
    )


def division_report(numerator, divisor, bound: Optional[int] = None) -> DivisionReport:
    quotient = exact_divide(numerator, divisor)
    agrees = None
    if bound is not None:
        agrees = divides_brute(numerator, divisor, bound) == quotient
    return DivisionReport(
        numerator=numerator,
        divisor=divisor,
        divisible=quotient is not None,
        quotient=quotient,
        brute_bound=bound,
        brute_agrees=agrees,
    )


class WitnessReport(BaseModel):
    antecedent: DiffScheme = Field(description="Scheme the function is differentiable for")
    consequent: DiffScheme = Field(description="Scheme the function is not differentiable for")
    kind: str = Field(description="order-gap, order-drop or same-order")
    function: FunctionSpec = Field(description="The witness function")
    check: Optional[WitnessCheck] = Field(default=None, description="Grid verification")
    probes: List[ProbeReport] = Field(
        default_factory=list, description="Quotient probes demonstrating an order gap"
    )


def witness_report(
    antecedent: DiffScheme,
    consequent: DiffScheme,
    scale_count: int = DEFAULT_SCALE_COUNT,
    window_cap: Optional[int] = None,
) -> WitnessReport:
    n, m = decision_order(antecedent), decision_order(consequent)
    function = build_witness(antecedent, consequent, scale_count, window_cap)
    if n < m:
        probes = [
            probe(s, function, ProbeSequence(branch=branch))
            for s in (consequent, antecedent)
            for branch in (Branch.RATIONAL, Branch.SQRT2)
        ]
        return WitnessReport(
            antecedent=antecedent,
            consequent=consequent,
            kind="order-gap",
            function=function,
            probes=probes,
        )
    return WitnessReport(
        antecedent=antecedent,
        consequent=consequent,
        kind="order-drop" if n > m else "same-order",
        function=function,
        check=verify_witness(function.witness, antecedent, consequent),
    )


class CatalogEntry(BaseModel):
    name: str
    parameters: List[str]
    description: str


class CatalogReport(BaseModel):
    entries: List[CatalogEntry]


def catalog_report() -> CatalogReport:
    return CatalogReport(
        entries=[
            CatalogEntry(name=name, parameters=list(arity), description=description)
            for name, (_, arity, description) in CATALOG.items()
        ]
    )


class ResolvedReference(BaseModel):
    reference: str
    scheme: DiffScheme
    order: Optional[int] = None
    excess: Optional[int] = None


def machine_record(command: str, report: BaseModel) -> Dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        **report.model_dump(mode="json", by_alias=True),
    }


def _scalar(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def _flatten(prefix: str, value, lines: List[str]):
    if isinstance(value, dict):
        for key, item in value.items():
            _flatten(f"{prefix}.{key}" if prefix else str(key), item, lines)
    elif isinstance(value, list) and any(isinstance(item, (dict, list)) for item in value):
        for index, item in enumerate(value):
            _flatten(f"{prefix}[{index}]", item, lines)
    elif isinstance(value, list):
        lines.append(f"{prefix}: [{'; '.join(_scalar(item) for item in value)}]")
    else:
        lines.append(f"{prefix}: {_scalar(value)}")


def render_text(record: Dict[str, Any]) -> str:
    """``key: value`` lines of a machine record; probe samples also as a table."""
    lines: List[str] = []
    _flatten("", record, lines)
    samples = record.get("samples")
    if samples:
        width = max(len(sample["h"]) for sample in samples)
        lines.append("")
        lines.append(f"{'h'.ljust(width)}  quotient")
        lines.extend(f"{sample['h'].ljust(width)}  {sample['quotient']}" for sample in samples)
    return "\n".join(lines)


def render_machine(record: Dict[str, Any]) -> str:
    return json.dumps(record, indent=2)

