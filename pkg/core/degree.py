"""
Degree of sphere self-maps

S^1: winding number by lifting image angles along the loop, bisecting any
arc whose wrapped increment comes too close to pi. S^2: simplicial
approximation on an icosphere, counting signed image triangles over a few
random targets. Any n: a Nowhere Anti-Unanimity scan that, when it
certifies, proves the map is chord-homotopic to the identity (degree 1).

``coordinate_degrees`` assembles d_alpha = deg(f_alpha) and
D[i,j] = deg(f_{i,j}) for a rule; a continuous total rule must satisfy
D[i,j] = d_i + d_j.
"""

import math
from enum import Enum
from functools import lru_cache
from itertools import combinations
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from core import settings
from core.conditions import NauScanResult, scan_nau
from core.errors import (
    DimensionMismatch,
    IncompleteReport,
    NonIntegerTotal,
    RefinementExceeded,
    StarConditionFailed,
    TargetDisagreement,
    TopochoiceError,
    UndefinedAtPoint,
    UnsupportedDimension,
)
from core.rules import AggregationRule, SphereSelfMap, restrict_coordinate, restrict_pair
from core.sphere_core import SampleNet, SpherePoint, random_points
from utils.logger import get_logger

logger = get_logger("degree")

GUARD_BAND = math.pi - 0.1
WINDING_RESIDUAL_TOL = 1e-6
DET_TOL = 1e-12
MAX_EXTRA_LEVELS = 3
MAX_TARGET_REDRAWS = 10


class DegreeMethod(str, Enum):
    WINDING_LIFT = "winding_lift"
    SIMPLICIAL_S2 = "simplicial_s2"
    NAU_CERTIFICATE = "nau_certificate"


class DegreeResult(BaseModel):
    value: int
    method: DegreeMethod
    samples_used: int
    refinement_depth: int
    # winding: distance of total/2pi from the integer; simplicial: number of agreeing targets
    residual: float


class DegreeConfig(BaseModel):
    initial_samples: int = Field(default=settings.WINDING_SAMPLES, ge=3)
    max_depth: int = Field(default=settings.WINDING_MAX_DEPTH, ge=0)
    subdivision_level: int = Field(default=settings.ICOSPHERE_LEVEL, ge=0)
    targets: int = Field(default=settings.SIMPLICIAL_TARGETS, ge=1)
    seed: int = settings.DEFAULT_SEED


# ---------------------------------------------------------------------------
# S^1
# ---------------------------------------------------------------------------

def _wrap(delta: float) -> float:
    """Into (-pi, pi]"""
    w = math.remainder(delta, 2.0 * math.pi)
    return math.pi if w == -math.pi else w


def winding_number(g: SphereSelfMap, initial_samples: int = settings.WINDING_SAMPLES,
                   max_depth: int = settings.WINDING_MAX_DEPTH) -> DegreeResult:
    if g.dim_n != 1:
        raise UnsupportedDimension(f"winding numbers need a map on S^1, got S^{g.dim_n}")
    evaluations = 0
    deepest = 0

    def image_angle(t: float) -> float:
        nonlocal evaluations
        evaluations += 1
        y = g(SpherePoint.from_angle(2.0 * math.pi * t))
        return math.atan2(float(y.coords[1]), float(y.coords[0]))

    def lift(t0: float, t1: float, a0: float, a1: float, depth: int) -> float:
        nonlocal deepest
        deepest = max(deepest, depth)
        delta = _wrap(a1 - a0)
        if abs(delta) < GUARD_BAND:
            return delta
        if depth >= max_depth:
            arc = (2.0 * math.pi * t0, 2.0 * math.pi * t1)
            raise RefinementExceeded(
                f"{g.provenance}: image jumps by {abs(delta):.3f} rad on arc "
                f"[{arc[0]:.6f}, {arc[1]:.6f}] after {max_depth} bisections", arc)
        tm = 0.5 * (t0 + t1)
        am = image_angle(tm)
        return lift(t0, tm, a0, am, depth + 1) + lift(tm, t1, am, a1, depth + 1)

    ts = [t / initial_samples for t in range(initial_samples)]
    angles = [image_angle(t) for t in ts]
    total = 0.0
    for idx in range(initial_samples):
        t0, a0 = ts[idx], angles[idx]
        # close the loop on the first sample itself
        t1, a1 = (ts[idx + 1], angles[idx + 1]) if idx + 1 < initial_samples else (1.0, angles[0])
        total += lift(t0, t1, a0, a1, 0)

    turns = total / (2.0 * math.pi)
    value = int(round(turns))
    residual = abs(turns - value)
    if residual > WINDING_RESIDUAL_TOL:
        raise NonIntegerTotal(f"{g.provenance}: lifted total is {turns:.9f} turns", residual)
    return DegreeResult(value=value, method=DegreeMethod.WINDING_LIFT, samples_used=evaluations,
                        refinement_depth=deepest, residual=residual)


# ---------------------------------------------------------------------------
# S^2
# ---------------------------------------------------------------------------

def _icosahedron() -> Tuple[np.ndarray, List[Tuple[int, int, int]]]:
    t = (1.0 + math.sqrt(5.0)) / 2.0
    verts = np.array([
        (-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0),
        (0, -1, t), (0, 1, t), (0, -1, -t), (0, 1, -t),
        (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1),
    ], dtype=float)
    verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    return verts, faces


@lru_cache(maxsize=None)
def icosphere(level: int) -> Tuple[np.ndarray, np.ndarray]:
    """Vertices (V, 3) on the unit sphere and outward-oriented faces (F, 3)"""
    verts, faces = _icosahedron()
    vert_list = [v for v in verts]
    for _ in range(level):
        midpoints: Dict[Tuple[int, int], int] = {}

        def midpoint(a: int, b: int) -> int:
            key = (a, b) if a < b else (b, a)
            if key not in midpoints:
                s = vert_list[a] + vert_list[b]
                vert_list.append(s / np.linalg.norm(s))
                midpoints[key] = len(vert_list) - 1
            return midpoints[key]

        refined = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            refined.extend([(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)])
        faces = refined

    V = np.array(vert_list)
    F = np.array(faces, dtype=np.int64)
    # outward orientation: det(v0, v1, v2) > 0
    dets = np.einsum("ij,ij->i", V[F[:, 0]], np.cross(V[F[:, 1]], V[F[:, 2]]))
    flip = dets < 0
    F[flip] = F[flip][:, [0, 2, 1]]
    V.setflags(write=False)
    F.setflags(write=False)
    return V, F


def _map_vertices(g: SphereSelfMap, V: np.ndarray) -> np.ndarray:
    images = np.empty_like(V)
    undefined = []
    for idx, v in enumerate(V):
        try:
            images[idx] = g(SpherePoint._trusted(v.copy())).coords
        except UndefinedAtPoint:
            undefined.append(v.tolist())
    if undefined:
        raise UndefinedAtPoint(f"{g.provenance} undefined at {len(undefined)} mesh vertices", undefined)
    return images


def _count_cover(A: np.ndarray, B: np.ndarray, C: np.ndarray, D0: np.ndarray, y: np.ndarray) -> Optional[int]:
    """Signed number of image triangles whose interior contains y; None when y is too close to an edge"""
    d1 = np.cross(B, C) @ y
    d2 = np.cross(C, A) @ y
    d3 = np.cross(A, B) @ y
    facing = (A + B + C) @ y > 0.0
    sign = np.sign(D0)
    live = np.abs(D0) >= DET_TOL

    sides = np.stack([d1, d2, d3], axis=1)
    agree = (np.sign(sides) == sign[:, None]) & (np.abs(sides) >= DET_TOL)
    inside = facing & live & agree.all(axis=1)

    # y on an edge: one side test vanishes while the other two agree with the orientation
    near = np.abs(sides) < DET_TOL
    on_edge = facing & live & near.any(axis=1) & (agree | near).all(axis=1)
    # a collapsed triangle only matters if y sits on the arc it collapsed to
    spread = np.maximum(np.linalg.norm(A - B, axis=1), np.linalg.norm(A - C, axis=1))
    on_degenerate = facing & ~live & near.all(axis=1) & (np.linalg.norm(A - y, axis=1) <= spread + DET_TOL)
    if np.any(on_edge) or np.any(on_degenerate):
        return None
    return int(sign[inside].sum())


def simplicial_degree_s2(g: SphereSelfMap, subdivision_level: int = settings.ICOSPHERE_LEVEL,
                         targets: int = settings.SIMPLICIAL_TARGETS,
                         seed: Optional[int] = settings.DEFAULT_SEED) -> DegreeResult:
    if g.dim_n != 2:
        raise UnsupportedDimension(f"simplicial degree needs a map on S^2, got S^{g.dim_n}")

    level = subdivision_level
    evaluations = 0
    while True:
        V, F = icosphere(level)
        W = _map_vertices(g, V)
        evaluations += len(V)
        A, B, C = W[F[:, 0]], W[F[:, 1]], W[F[:, 2]]
        # star condition: every image triangle has geodesic diameter < pi/2
        min_dot = np.minimum(np.minimum(np.einsum("ij,ij->i", A, B), np.einsum("ij,ij->i", B, C)),
                             np.einsum("ij,ij->i", A, C))
        if np.all(min_dot > 0.0):
            break
        if level >= subdivision_level + MAX_EXTRA_LEVELS:
            raise StarConditionFailed(
                f"{g.provenance}: image triangles still span >= pi/2 at icosphere level {level}")
        logger.debug(f"star condition failed at level {level}, refining")
        level += 1

    D0 = np.einsum("ij,ij->i", A, np.cross(B, C))
    rng = np.random.default_rng(seed)
    counts: List[int] = []
    for _ in range(targets):
        for _attempt in range(MAX_TARGET_REDRAWS + 1):
            y = random_points(2, 1, rng)[0]
            count = _count_cover(A, B, C, D0, y)
            if count is not None:
                counts.append(count)
                break
        else:
            raise TargetDisagreement(f"{g.provenance}: every target landed on an image edge", counts)
    if len(set(counts)) != 1:
        raise TargetDisagreement(f"{g.provenance}: targets disagree on the degree: {counts}", counts)
    return DegreeResult(value=counts[0], method=DegreeMethod.SIMPLICIAL_S2, samples_used=evaluations,
                        refinement_depth=level, residual=float(len(counts)))


def degree(g: SphereSelfMap, dim_n: int, cfg: Optional[DegreeConfig] = None) -> DegreeResult:
    cfg = cfg or DegreeConfig()
    if g.dim_n != dim_n:
        raise DimensionMismatch(f"{g.provenance} lives on S^{g.dim_n}, asked for S^{dim_n}")
    if dim_n == 1:
        return winding_number(g, cfg.initial_samples, cfg.max_depth)
    if dim_n == 2:
        return simplicial_degree_s2(g, cfg.subdivision_level, cfg.targets, cfg.seed)
    raise UnsupportedDimension(
        f"direct degree computation covers S^1 and S^2 only (got n={dim_n}); "
        f"use homotopy_certificate_nau for an n-agnostic degree-one certificate")


# ---------------------------------------------------------------------------
# Degree reports for rules
# ---------------------------------------------------------------------------

class PairDegree(BaseModel):
    i: int
    j: int
    deg: Optional[int] = None


class DegreeReport(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    rule_name: str = Field(alias="rule")
    k: int
    dim_n: int
    d: List[Optional[int]]
    D: List[PairDegree]
    additivity_ok: bool
    failures: List[List[int]] = Field(default_factory=list)
    diagnostics: Dict[str, Any] = Field(default_factory=dict)

    @property
    def complete(self) -> bool:
        return all(v is not None for v in self.d) and all(p.deg is not None for p in self.D)

    def pair_degree(self, i: int, j: int) -> Optional[int]:
        for p in self.D:
            if (p.i, p.j) == (min(i, j), max(i, j)):
                return p.deg
        raise KeyError((i, j))


class AdditivityVerdict(BaseModel):
    consistent: bool
    violations: List[List[int]] = Field(default_factory=list)


def _additivity_failures(d: List[Optional[int]], D: List[PairDegree]) -> List[List[int]]:
    return [
        [p.i, p.j] for p in D
        if p.deg is not None and d[p.i - 1] is not None and d[p.j - 1] is not None
        and p.deg != d[p.i - 1] + d[p.j - 1]
    ]


def coordinate_degrees(rule: AggregationRule, cfg: Optional[DegreeConfig] = None) -> DegreeReport:
    cfg = cfg or DegreeConfig()
    if rule.dim_n not in (1, 2):
        raise UnsupportedDimension(f"degree reports cover S^1 and S^2 only, got n={rule.dim_n}")
    errors: Dict[str, str] = {}
    samples: Dict[str, int] = {}

    def measure(g: SphereSelfMap, label: str) -> Optional[int]:
        try:
            result = degree(g, rule.dim_n, cfg)
        except TopochoiceError as e:
            errors[label] = f"{type(e).__name__}: {e}"
            logger.debug(f"{label} unavailable: {e}")
            return None
        samples[label] = result.samples_used
        return result.value

    d = [measure(restrict_coordinate(rule, a), f"f_{a}") for a in range(1, rule.k + 1)]
    D = [PairDegree(i=i, j=j, deg=measure(restrict_pair(rule, i, j), f"f_{{{i},{j}}}"))
         for i, j in combinations(range(1, rule.k + 1), 2)]
    failures = _additivity_failures(d, D)
    diagnostics: Dict[str, Any] = {
        "method": DegreeMethod.WINDING_LIFT.value if rule.dim_n == 1 else DegreeMethod.SIMPLICIAL_S2.value,
        "samples_used": samples,
        "unavailable": sorted(errors),
        "errors": errors,
    }
    logger.info(f"🧮 degrees of {rule.name}: d={d}, additivity {'ok' if not failures else 'fails'}")
    return DegreeReport(rule_name=rule.name, k=rule.k, dim_n=rule.dim_n, d=d, D=D,
                        additivity_ok=not failures, failures=failures, diagnostics=diagnostics)


def additivity_check(report: DegreeReport) -> AdditivityVerdict:
    if not report.complete:
        raise IncompleteReport(f"degree report for {report.rule_name} has unavailable entries: "
                               f"{report.diagnostics.get('unavailable', [])}")
    violations = _additivity_failures(report.d, report.D)
    return AdditivityVerdict(consistent=not violations, violations=violations)


class HomotopyVerdict(BaseModel):
    certified_degree_one: bool
    gap: float
    slack: float
    scan: NauScanResult


def homotopy_certificate_nau(g: SphereSelfMap, lipschitz_bound: float, net: SampleNet) -> HomotopyVerdict:
    """If g(x) stays clear of -x on the whole sphere, the chord homotopy joins g to the identity"""
    if lipschitz_bound < 0:
        raise ValueError(f"lipschitz_bound must be >= 0, got {lipschitz_bound}")
    if net.dim_n != g.dim_n:
        raise DimensionMismatch(f"net on S^{net.dim_n}, map on S^{g.dim_n}")
    scan = scan_nau(g, net, lipschitz_bound)
    return HomotopyVerdict(certified_degree_one=scan.certified, gap=scan.gap,
                           slack=scan.certificate_slack, scan=scan)
