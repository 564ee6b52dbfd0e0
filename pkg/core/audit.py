"""
Audits

Runs the impossibility argument backwards on a concrete rule: compute the
coordinate degrees, use the integer degree system to pick a pair (i, j)
whose restriction f_{i,j} is not of degree 1, find a point x0 with
f_{i,j}(x0) = -x0, and turn it into a verified violation certificate.
"""

import time
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from core import settings
from core.conditions import (
    AntipodeConfig,
    ViolationCertificate,
    locate_antipodal_point,
    noshow_witness_from_antipode,
    twin_witness_from_antipode,
)
from core.degree import DegreeConfig, DegreeReport, coordinate_degrees
from core.errors import (
    AntipodeSearchStalled,
    AuditInvariantBroken,
    BadK,
    PreconditionViolated,
    UnsupportedDimension,
)
from core.rules import AggregationRule, RuleFamily, restrict_pair
from core.sphere_core import SpherePoint, default_net, geodesic_distance
from utils.logger import get_logger

logger = get_logger("audit")

Y_MIN_DISTANCE = 0.5


class SystemStatus(str, Enum):
    UNSAT = "unsat"
    SAT = "sat"


class DegreeSystemVerdict(BaseModel):
    k: int
    status: SystemStatus
    witness_solution: Optional[List[int]] = None
    parameterization: Optional[List[str]] = None
    refutation_trace: Optional[List[str]] = None


def solve_twin_degree_system(k: int) -> DegreeSystemVerdict:
    """Decide whether integers d_1..d_k can satisfy d_i + d_j = 1 for every pair i != j"""
    if k < 2:
        raise BadK(f"the degree system needs k >= 2 voters, got {k}")
    if k == 2:
        return DegreeSystemVerdict(k=2, status=SystemStatus.SAT, witness_solution=[1, 0],
                                   parameterization=["d₁ = t", "d₂ = 1 − t"])

    one = Fraction(1)
    s12, s13, s23 = one, one, one
    d1 = (s12 + s13 - s23) / 2
    trace = [
        "d₁ + d₂ = 1",
        "d₁ + d₃ = 1",
        "d₂ + d₃ = 1",
        "(d₁ + d₂) + (d₁ + d₃) − (d₂ + d₃) = 2·d₁ = 1",
        f"d₁ = {d1}, not an integer",
    ]
    return DegreeSystemVerdict(k=k, status=SystemStatus.UNSAT, refutation_trace=trace)


class AuditMode(str, Enum):
    TWIN = "twin"
    NOSHOW = "noshow"


class AuditStatus(str, Enum):
    PROVED_WITH_WITNESS = "proved_with_witness"
    DEGREES_UNAVAILABLE = "degrees_unavailable"
    RULE_PARTIAL_DETECTED = "rule_partial_detected"


class AuditConfig(BaseModel):
    degree: DegreeConfig = Field(default_factory=DegreeConfig)
    antipode: AntipodeConfig = Field(default_factory=AntipodeConfig)
    y_net_size: int = Field(default=64, ge=2)
    seed: int = settings.DEFAULT_SEED
    wall_time: bool = settings.REPORT_WALL_TIME


class AuditReport(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    rule_name: str = Field(alias="rule")
    mode: AuditMode
    status: AuditStatus
    degrees: DegreeReport
    pair: Optional[List[int]] = None
    antipode: Optional[Dict[str, Any]] = None
    certificate: Optional[ViolationCertificate] = None
    wall_time_ms: Optional[float] = None
    diagnostics: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _proof_carries_verified_certificate(self) -> "AuditReport":
        if self.status is AuditStatus.PROVED_WITH_WITNESS:
            if self.certificate is None or not self.certificate.verified:
                raise ValueError("proved_with_witness requires a verified certificate")
        return self


def _choose_pair(report: DegreeReport) -> Optional[Tuple[int, int]]:
    for entry in sorted(report.D, key=lambda p: (p.i, p.j)):
        if entry.deg != 1:
            return entry.i, entry.j
    return None


def _pick_y(x0: SpherePoint, size: int, seed: int) -> SpherePoint:
    net = default_net(x0.dim_n, size, seed)
    for y in net.points:
        if geodesic_distance(y, x0) > Y_MIN_DISTANCE:
            return y
    raise AuditInvariantBroken(f"no net point lies farther than {Y_MIN_DISTANCE} from x0")


def _elapsed_ms(start: float, cfg: AuditConfig) -> Optional[float]:
    return round((time.perf_counter() - start) * 1000.0, 3) if cfg.wall_time else None


def _audit_degrees(rule: AggregationRule, mode: AuditMode, cfg: AuditConfig, start: float):
    """Stages 1-3: degrees, additivity, pair choice. Returns (early report, None) or (degrees, pair)"""
    if rule.dim_n not in (1, 2):
        raise UnsupportedDimension(f"audits cover S^1 and S^2 only, got n={rule.dim_n}")
    logger.info(f"🔍 degrees of {rule.name}")
    degrees = coordinate_degrees(rule, cfg.degree)

    if degrees.failures:
        logger.info(f"⚠️ {rule.name} fails additivity on {degrees.failures}: not a continuous total rule")
        return AuditReport(rule_name=rule.name, mode=mode, status=AuditStatus.RULE_PARTIAL_DETECTED,
                           degrees=degrees, wall_time_ms=_elapsed_ms(start, cfg),
                           diagnostics={"failing_pairs": degrees.failures}), None
    if not degrees.complete:
        logger.info(f"⚠️ degrees unavailable for {degrees.diagnostics.get('unavailable')}")
        return AuditReport(rule_name=rule.name, mode=mode, status=AuditStatus.DEGREES_UNAVAILABLE,
                           degrees=degrees, wall_time_ms=_elapsed_ms(start, cfg),
                           diagnostics={"unavailable": degrees.diagnostics.get("unavailable", [])}), None

    verdict = solve_twin_degree_system(rule.k)
    pair = _choose_pair(degrees)
    if verdict.status is not SystemStatus.UNSAT or pair is None:
        raise AuditInvariantBroken(
            f"{rule.name}: additive degrees with every D[i,j] = 1 at k={rule.k}; the degree system says "
            f"{verdict.status.value}")
    logger.info(f"🎯 pair {pair} with D = {degrees.pair_degree(*pair)}")
    return degrees, pair


def _locate(rule: AggregationRule, pair: Tuple[int, int], cfg: AuditConfig):
    g = restrict_pair(rule, *pair)
    located = locate_antipodal_point(g, cfg.antipode)
    if not located.found:
        raise AntipodeSearchStalled(
            f"no x with {g.provenance}(x) = -x after {located.starts_used} starts "
            f"(best residual {located.residual:.3e})", located.residual)
    return located


def _finish(rule_name: str, mode: AuditMode, degrees: DegreeReport, pair: Tuple[int, int], located,
            cert: ViolationCertificate, k: int, cfg: AuditConfig, start: float) -> AuditReport:
    if not cert.verified:
        raise AuditInvariantBroken("witness certificate failed independent re-verification")
    logger.info(f"✅ {cert.kind.value} violation certified for {rule_name}")
    return AuditReport(
        rule_name=rule_name, mode=mode, status=AuditStatus.PROVED_WITH_WITNESS, degrees=degrees,
        pair=list(pair),
        antipode={"point": located.point.to_list(), "residual": located.residual},
        certificate=cert, wall_time_ms=_elapsed_ms(start, cfg),
        diagnostics={
            "degree_system": solve_twin_degree_system(k).model_dump(mode="json"),
            "antipode_starts": located.starts_used,
        },
    )


def run_twin_audit(rule: AggregationRule, cfg: Optional[AuditConfig] = None) -> AuditReport:
    cfg = cfg or AuditConfig()
    if rule.k < 3:
        raise PreconditionViolated(
            f"twin audits need k >= 3 (got k={rule.k}); at k=2 the degree system is satisfiable")
    start = time.perf_counter()
    degrees, pair = _audit_degrees(rule, AuditMode.TWIN, cfg, start)
    if pair is None:
        return degrees

    located = _locate(rule, pair, cfg)
    y = _pick_y(located.point, cfg.y_net_size, cfg.seed)
    cert = twin_witness_from_antipode(rule, pair[0], pair[1], located.point, y)
    return _finish(rule.name, AuditMode.TWIN, degrees, pair, located, cert, rule.k, cfg, start)


def run_noshow_audit(family: RuleFamily, k: int, cfg: Optional[AuditConfig] = None) -> AuditReport:
    cfg = cfg or AuditConfig()
    if k < 2:
        raise PreconditionViolated(f"no-show audits need k >= 2 so that k+1 >= 3, got k={k}")
    if not (family.supports(k) and family.supports(k + 1)):
        raise PreconditionViolated(f"family {family.name} must support k={k} and k+1={k + 1}")
    start = time.perf_counter()
    big = family.rule(k + 1)
    degrees, pair = _audit_degrees(big, AuditMode.NOSHOW, cfg, start)
    if pair is None:
        return degrees.model_copy(update={"rule_name": family.name})

    located = _locate(big, pair, cfg)
    cert = noshow_witness_from_antipode(family, k, pair[0], pair[1], located.point)
    return _finish(family.name, AuditMode.NOSHOW, degrees, pair, located, cert, k + 1, cfg, start)
