"""
Request records: the command envelope and the payload schema of every command.
"""
from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from qfib.exceptions import InvalidInput

COMMANDS = (
    "analyze", "residues", "faddeev", "hilbert", "jinv", "cm", "certify",
    "verify-cert", "components", "pencil", "zarhin", "tau",
)

Command = Literal[
    "analyze", "residues", "faddeev", "hilbert", "jinv", "cm", "certify",
    "verify-cert", "components", "pencil", "zarhin", "tau",
]


class Request(BaseModel):
    """One command and its JSON payload."""

    model_config = ConfigDict(extra="forbid")

    command: Command
    payload: dict[str, Any] = Field(default_factory=dict)


class _Payload(BaseModel):
    model_config = ConfigDict(extra="forbid")


class AnalyzePayload(_Payload):
    p: Optional[str] = None
    a: str = "-1"
    b: str = "-1"
    diagonal: Optional[str] = None
    fibration: Optional[dict[str, Any]] = None

    @model_validator(mode="after")
    def _one_source(self):
        given = [name for name in ("p", "diagonal", "fibration") if getattr(self, name) is not None]
        if len(given) != 1:
            raise ValueError(f"exactly one of p, diagonal, fibration is required, got {given or 'none'}")
        return self


class SymbolPayload(_Payload):
    f: str
    g: str


class HilbertPayload(_Payload):
    a: str
    b: str
    place: Union[str, int] = "real"


class QuadraticPayload(_Payload):
    p: str


class CertifyPayload(_Payload):
    p: str
    rational: bool = False


class VerifyCertPayload(_Payload):
    certificate: dict[str, Any]


class ComponentsPayload(_Payload):
    g: Optional[str] = None
    diagonal: Optional[str] = None

    @model_validator(mode="after")
    def _one_source(self):
        if (self.g is None) == (self.diagonal is None):
            raise ValueError("exactly one of g, diagonal is required")
        return self


class PencilPayload(_Payload):
    f: Union[str, list[Union[str, int]]]
    g: Union[str, list[Union[str, int]]]
    fibration: Optional[dict[str, Any]] = None


class ZarhinPayload(_Payload):
    f: str
    prime_budget: Optional[int] = Field(default=None, gt=0)


class TauPayload(_Payload):
    D: Optional[int] = None
    k: Optional[int] = None
    beta: Optional[int] = None
    n_max: Optional[int] = None
    k_max: Optional[int] = None

    @model_validator(mode="after")
    def _one_mode(self):
        check = [self.D, self.k, self.beta]
        family = [self.n_max, self.k_max]
        if all(v is not None for v in check) and all(v is None for v in family):
            return self
        if all(v is not None for v in family) and all(v is None for v in check):
            return self
        raise ValueError("give either D, k, beta or n_max, k_max")


PAYLOAD_SCHEMAS = {
    "analyze": AnalyzePayload,
    "residues": SymbolPayload,
    "faddeev": SymbolPayload,
    "hilbert": HilbertPayload,
    "jinv": QuadraticPayload,
    "cm": QuadraticPayload,
    "certify": CertifyPayload,
    "verify-cert": VerifyCertPayload,
    "components": ComponentsPayload,
    "pencil": PencilPayload,
    "zarhin": ZarhinPayload,
    "tau": TauPayload,
}


def parse_request(data):
    """
    Validate a request dict (or JSON text) and its payload.

    Returns:
        tuple: (Request, payload model)

    Raises:
        InvalidInput: on any schema violation
    """
    try:
        if isinstance(data, (str, bytes)):
            request = Request.model_validate_json(data)
        else:
            request = Request.model_validate(data)
        payload = PAYLOAD_SCHEMAS[request.command].model_validate(request.payload)
    except ValidationError as e:
        raise InvalidInput(f"Malformed request: {e.errors(include_url=False)}") from e
    return request, payload
