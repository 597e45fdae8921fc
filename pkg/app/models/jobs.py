import datetime
from enum import Enum
from typing import Optional

from pydantic import Field, model_validator

from app.models.requests import WitnessRequest
from grd.reports import WitnessReport
from grd.schemes import resolve_scheme


class StateEnum(str, Enum):
    """Enum for the state of a witness job."""

    CREATED = "CREATED"
    CLAIMED = "CLAIMED"
    FAILED = "FAILED"
    FINISHED = "FINISHED"


class WitnessJob(WitnessRequest):
    """Model for a queued witness construction."""

    id: Optional[int] = Field(default=None, description="Job ID")
    witness: Optional[WitnessReport] = Field(
        default=None, description="Witness built by a worker"
    )
    created_at: datetime.datetime = Field(
        default_factory=datetime.datetime.now,
        description="Timestamp when the job was created",
    )
    last_updated_at: datetime.datetime = Field(
        default_factory=datetime.datetime.now,
        description="Timestamp when the job was last updated",
    )
    state: StateEnum = Field(default=StateEnum.CREATED, description="State of the job")
    error_message: Optional[str] = Field(
        default=None, description="Error message if the job failed"
    )

    def built_for(self, witness: WitnessReport) -> bool:
        """Whether the witness was built for the schemes this job names."""
        return (
            str(resolve_scheme(self.antecedent)) == str(witness.antecedent)
            and str(resolve_scheme(self.consequent)) == str(witness.consequent)
        )

    @model_validator(mode="after")
    def validate_witness(self):
        """Validates that only finished jobs carry a witness built for their schemes."""
        if self.witness is None:
            return self
        if self.state != StateEnum.FINISHED:
            raise ValueError(f"Only finished jobs carry a witness, state is {self.state.value}.")
        if self.witness.check is not None and not self.witness.check.passed:
            raise ValueError("The witness failed its verification.")
        if not self.built_for(self.witness):
            raise ValueError("The witness was built for other schemes.")
        return self
