"""
Pydantic schemas for hypdomain files and reports.
"""
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

# Complex numbers travel as [re, im] pairs everywhere
Pair = Tuple[float, float]


class ReportModel(BaseModel):
    """Base for report models; +inf bounds serialize as JSON Infinity."""
    model_config = ConfigDict(ser_json_inf_nan="constants")


class Violation(BaseModel):
    """A single problem found by domain validation."""
    field: str = Field(..., description="Path of the offending field, e.g. 'halfspaces[2].c'")
    message: str = Field(..., description="Human readable description")


class HalfSpaceFile(BaseModel):
    """One half-space {Re(c·z) > a} (or < a when sense is '<')."""
    c: List[Pair] = Field(..., description="Coefficient vector as [re, im] pairs")
    a: float = Field(..., description="Threshold")
    sense: Literal[">", "<"] = Field(">", description="Side of the hyperplane that is kept")


class DomainFile(BaseModel):
    """Serialized domain: dimension, half-spaces and interior witness."""
    dim: int = Field(..., description="Ambient complex dimension N")
    halfspaces: List[HalfSpaceFile] = Field(default_factory=list, description="Open half-spaces; empty means C^N")
    witness: List[Pair] = Field(..., description="Strictly interior point as [re, im] pairs")


class MapFile(BaseModel):
    """Serialized split self-map f(z, w) = (phi(z), psi(z, w))."""
    k: int = Field(..., ge=0, description="Hyperbolic factor dimension")
    m: int = Field(..., ge=0, description="Flat dimension")
    phi: List[Dict[str, Any]] = Field(default_factory=list, description="k expression trees in z only")
    psi: List[Dict[str, Any]] = Field(default_factory=list, description="m expression trees in (z, w)")


class DistanceBracket(ReportModel):
    """Certified bounds lower <= k_D(z, w) <= upper."""
    lower: float = Field(..., ge=0.0, description="Certified lower bound")
    upper: float = Field(..., description="Certified upper bound (may be +inf)")
    lower_method: str = Field(..., description="Estimator that produced the lower bound")
    upper_method: str = Field(..., description="Estimator that produced the upper bound")

    @model_validator(mode="after")
    def _ordered(self):
        if self.upper < self.lower:
            raise ValueError(f"upper {self.upper} < lower {self.lower}")
        return self

    @property
    def is_degenerate(self) -> bool:
        return self.lower == 0.0 and self.upper == 0.0


class PotentialReport(ReportModel):
    """Samples of a peak/antipeak candidate along a ray, with the limit verdict."""
    kind: Literal["peak_sum", "peak_max", "antipeak_log"] = Field(..., description="Potential")
    samples: List[Tuple[float, float]] = Field(..., description="(radius, value) pairs")
    verdict: Literal["limit_zero", "limit_minus_infinity", "limit_other"] = Field(..., description="Limit verdict")
    limit_value: Optional[float] = Field(None, description="c for limit_other")
    fitted_rate: float = Field(..., description="b in c + b/r (peak) or -b log r + c (antipeak)")
    fitted_offset: float = Field(..., description="c of the fit")
    note: Optional[str] = Field(None, description="Caveats for this verdict")

    @model_validator(mode="after")
    def _increasing(self):
        radii = [r for r, _ in self.samples]
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise ValueError("radii must be strictly increasing")
        return self


class OrbitSummary(ReportModel):
    """Classification of an orbit, labelled heuristic."""
    classification: Literal["escaping", "periodic", "converging", "undecided"] = Field(..., description="Orbit class")
    period: Optional[int] = Field(None, description="Minimal period for periodic orbits")
    limit: Optional[List[Pair]] = Field(None, description="Limit point for converging orbits")
    length: int = Field(..., description="Number of recorded points")
    left_domain: bool = Field(False, description="An iterate left the domain (not a self-map on this orbit)")
    overflowed: bool = Field(False, description="Evaluation overflowed; treated as escape")
    evidence: Dict[str, Any] = Field(default_factory=dict, description="Numeric details behind the class")
    method: str = Field("heuristic", description="Classification rules are thresholds, not proofs")


class VerdictBlock(BaseModel):
    hyperbolic: bool = Field(..., description="Kobayashi hyperbolic (k = N)")
    k: int = Field(..., description="Hyperbolic rank")
    m: int = Field(..., description="Flat dimension N - k")
    bergman_admissible: bool = Field(..., description="Admits the Bergman metric (equal to hyperbolic)")
    transform_condition: float = Field(..., description="Condition number of the coordinate change T")


class CertificateBlock(BaseModel):
    kind: Literal["frame", "line"] = Field(..., description="Separating frame or complex line")
    frame_indices: List[int] = Field(default_factory=list, description="Constraint indices forming the frame")
    smallest_singular_value: Optional[float] = Field(None, description="Independence margin of the frame")
    line_base: Optional[List[Pair]] = Field(None, description="Base point of the complex line")
    line_direction: Optional[List[Pair]] = Field(None, description="Unit direction of the complex line")
    residual: Optional[float] = Field(None, description="max_j |L_j(v)| for the line direction")
    method: str = Field("certificate", description="How the entry is established")


class ConditionEntry(BaseModel):
    condition: str = Field(..., description="Equivalent condition name")
    holds: bool = Field(..., description="Whether the condition holds")
    certified_by: Literal["certificate", "equivalence", "counterexample"] = Field(..., description="Evidence kind")
    detail: Optional[str] = Field(None, description="Short evidence description")


class RealizationStats(BaseModel):
    samples: int = Field(..., description="Number of sampled interior points")
    max_modulus: float = Field(..., description="Largest image coordinate modulus")
    max_roundtrip_error: float = Field(..., description="Largest relative round-trip error")
    method: str = Field("closed_form", description="Map evaluated in closed form")


class DistanceRow(ReportModel):
    z: List[Pair] = Field(..., description="First point")
    w: List[Pair] = Field(..., description="Second point")
    bracket: DistanceBracket = Field(..., description="Bounds on the distance")


class ExhaustionRow(ReportModel):
    R: float = Field(..., description="Box half-width")
    lower: float = Field(..., description="Lower bound on the truncated domain")
    method: str = Field("caratheodory_halfplane", description="Estimator")


class ReportDoc(ReportModel):
    """Complete analysis report written by the CLI."""
    tool: str = Field("hypdomain", description="Producing tool")
    version: str = Field(..., description="Tool version")
    command: str = Field(..., description="Subcommand that produced the report")
    input_sha256: str = Field(..., description="Hash of the domain file text")
    verdict: Optional[VerdictBlock] = None
    certificates: List[CertificateBlock] = Field(default_factory=list)
    conditions: List[ConditionEntry] = Field(default_factory=list)
    realization: Optional[RealizationStats] = None
    potential_scans: List[PotentialReport] = Field(default_factory=list)
    distances: List[DistanceRow] = Field(default_factory=list)
    exhaustion: List[ExhaustionRow] = Field(default_factory=list)
    orbits: List[OrbitSummary] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)


def serialize_report(report: ReportDoc) -> str:
    """
    Serialize a report to pretty JSON.

    Args:
        report: Report to serialize

    Returns:
        JSON string
    """
    return report.model_dump_json(indent=2)
