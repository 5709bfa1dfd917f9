"""
Report records: evidence, verdicts and the per-request report.
"""
from enum import Enum
from typing import Any, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from qfib import __version__
from qfib.models.request import Request
from qfib.utils.formatters import to_json_native


class VerdictStatus(str, Enum):
    RATIONAL = "RATIONAL"
    NOT_UNIV_CH0_TRIVIAL = "NOT_UNIV_CH0_TRIVIAL"
    UNIV_CH0_TRIVIAL = "UNIV_CH0_TRIVIAL"
    UNKNOWN = "UNKNOWN"


class Outcome(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    OBSTRUCTS = "obstructs"
    INFO = "info"


# Criteria whose pass proves universal CH0-triviality
UNIV_CRITERIA = ("A", "B", "positivity", "CM")


class Evidence(BaseModel):
    criterion: str
    anchor: str
    outcome: Outcome = Outcome.INFO
    data: dict[str, Any] = Field(default_factory=dict)

    @field_validator("data", mode="before")
    @classmethod
    def _json_native(cls, value):
        return to_json_native(value)

    @property
    def supports_univ(self):
        return self.criterion in UNIV_CRITERIA and self.outcome == Outcome.PASS

    @property
    def supports_not_univ(self):
        return self.outcome == Outcome.OBSTRUCTS


class Verdict(BaseModel):
    status: VerdictStatus
    reasons: list[Evidence]
    notes: list[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def _backed_by_evidence(self):
        if not self.reasons:
            raise ValueError("a verdict needs at least one evidence record")
        if self.status == VerdictStatus.UNIV_CH0_TRIVIAL and not any(e.supports_univ for e in self.reasons):
            raise ValueError("UNIV_CH0_TRIVIAL needs a passing criterion")
        if self.status == VerdictStatus.NOT_UNIV_CH0_TRIVIAL and not any(e.supports_not_univ for e in self.reasons):
            raise ValueError("NOT_UNIV_CH0_TRIVIAL needs a component or Brauer obstruction")
        return self


class Report(BaseModel):
    request: Optional[Request] = None
    result: dict[str, Any] = Field(default_factory=dict)
    evidence: list[Evidence] = Field(default_factory=list)
    exit_code: int = 0
    error: Optional[str] = None
    timing: float = 0.0
    version: str = __version__

    @field_validator("result", mode="before")
    @classmethod
    def _json_native(cls, value):
        return to_json_native(value)

    @model_validator(mode="after")
    def _evidence_on_success(self):
        if self.exit_code == 0 and not self.evidence:
            raise ValueError("a successful report carries at least one evidence record")
        return self
