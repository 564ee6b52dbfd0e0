"""
Twin, Participation and Nowhere Anti-Unanimity conditions

Checkers evaluate a condition at one profile. Searches hunt for violations
over sample nets. The witness builders work backwards from an antipodal point:
given a point x0 where a restricted map hits the antipode (g(x0) = -x0), they
assemble the concrete profile pair that breaks the Twin or the Participation
Condition. Every certificate is re-verified by evaluating the rule again.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, Iterator, List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, computed_field

from core import settings
from core.errors import (
    IndexOutOfRange,
    NotAntipodal,
    PreconditionViolated,
    TwinPreconditionViolated,
    UndefinedAtPoint,
    UndefinedAtProfile,
)
from core.rules import (
    AggregationRule,
    Profile,
    RuleFamily,
    SphereSelfMap,
    delete_voter,
    restrict_pair,
    twin_embedding,
    two_point_profile,
)
from core.sphere_core import (
    SampleNet,
    SpherePoint,
    antipode,
    default_net,
    exp_map,
    geodesic_distance,
    tangent_basis,
)
from utils.logger import get_logger

logger = get_logger("conditions")

EQ_TOL = 1e-9
WITNESS_TOL = 1e-6
STEP_FLOOR = 1e-6


class Condition(str, Enum):
    TWIN = "twin"
    PARTICIPATION = "participation"


class ViolationKind(str, Enum):
    WEAK = "weak"
    STRICTNESS = "strictness"


class CheckStatus(str, Enum):
    HOLDS = "holds"
    WEAK_VIOLATION = "weak_violation"
    STRICTNESS_VIOLATION = "strictness_violation"


_KIND_OF_STATUS = {
    CheckStatus.WEAK_VIOLATION: ViolationKind.WEAK,
    CheckStatus.STRICTNESS_VIOLATION: ViolationKind.STRICTNESS,
}


class CheckOutcome(BaseModel):
    status: CheckStatus
    d_before: float
    d_after: float

    @computed_field
    @property
    def margin(self) -> float:
        return self.d_after - self.d_before

    @property
    def holds(self) -> bool:
        return self.status is CheckStatus.HOLDS


class OutsiderOutcome(BaseModel):
    holds: bool
    deviation: float


class ViolationCertificate(BaseModel):
    """A re-verifiable profile pair breaking the Twin or Participation Condition

    twin: ``after_profile`` is ``before_profile`` with the partner's point
    replaced by the focal voter's. participation: ``before_profile`` is the
    abstention profile and ``after_profile`` has the focal voter inserted.
    """

    model_config = ConfigDict(extra="ignore")

    condition: Condition
    kind: ViolationKind
    rule_name: str
    before_profile: List[List[float]]
    after_profile: List[List[float]]
    focal_voter: int
    partner_voter: Optional[int] = None
    d_before: float
    d_after: float
    margin: float
    verified: bool = False

    @computed_field
    @property
    def deg(self) -> Dict[str, float]:
        return {
            "d_before": math.degrees(self.d_before),
            "d_after": math.degrees(self.d_after),
            "margin": math.degrees(self.margin),
        }

    def focal_point(self) -> SpherePoint:
        rows = self.before_profile if self.condition is Condition.TWIN else self.after_profile
        return SpherePoint(rows[self.focal_voter - 1])


class NauScanResult(BaseModel):
    map_provenance: str
    worst_point: List[float]
    gap: float
    net: Dict[str, object]
    lipschitz_bound: Optional[float] = None
    certified: bool
    certificate_slack: Optional[float] = None

    @computed_field
    @property
    def gap_deg(self) -> float:
        return math.degrees(self.gap)


def _classify(d_before: float, d_after: float, focal: SpherePoint, outcome_before: SpherePoint) -> CheckStatus:
    """Shared by both conditions: never farther, and strictly closer unless the focal voter already won"""
    if d_after - d_before > EQ_TOL:
        return CheckStatus.WEAK_VIOLATION
    if d_after - d_before >= -EQ_TOL and geodesic_distance(focal, outcome_before) > EQ_TOL:
        return CheckStatus.STRICTNESS_VIOLATION
    return CheckStatus.HOLDS


def _evaluate_twin(rule: AggregationRule, p: Profile, i: int, j: int) -> Tuple[CheckOutcome, Profile]:
    if i == j:
        raise IndexOutOfRange(f"twin check needs distinct voters, got i=j={i}")
    x_i, x_j = p.voter(i), p.voter(j)
    if geodesic_distance(x_i, x_j) <= EQ_TOL:
        raise TwinPreconditionViolated(f"voters {i} and {j} already agree")
    twinned = p.replace(j, x_i)
    outcome_before = rule.evaluate(p)
    outcome_after = rule.evaluate(twinned)
    d_before = geodesic_distance(outcome_before, x_i)
    d_after = geodesic_distance(outcome_after, x_i)
    status = _classify(d_before, d_after, x_i, outcome_before)
    return CheckOutcome(status=status, d_before=d_before, d_after=d_after), twinned


def check_twin(rule: AggregationRule, p: Profile, i: int, j: int) -> CheckOutcome:
    outcome, _ = _evaluate_twin(rule, p, i, j)
    return outcome


def _require_participation_family(family: RuleFamily, k: int) -> None:
    if k < 2:
        raise PreconditionViolated(f"participation compares k and k+1 voters with k >= 2, got k={k}")
    if not (family.supports(k) and family.supports(k + 1)):
        raise PreconditionViolated(f"family {family.name} must support k={k} and k+1={k + 1}")


def _evaluate_participation(family: RuleFamily, p: Profile, i: int) -> CheckOutcome:
    k = p.k - 1
    _require_participation_family(family, k)
    x_i = p.voter(i)
    abstention = delete_voter(p, i)
    try:
        outcome_out = family.rule(k).evaluate(abstention)
    except UndefinedAtProfile as e:
        raise UndefinedAtProfile(str(e), stage="abstention") from e
    try:
        outcome_in = family.rule(k + 1).evaluate(p)
    except UndefinedAtProfile as e:
        raise UndefinedAtProfile(str(e), stage="participation") from e
    d_in = geodesic_distance(outcome_in, x_i)
    d_out = geodesic_distance(outcome_out, x_i)
    status = _classify(d_out, d_in, x_i, outcome_out)
    return CheckOutcome(status=status, d_before=d_out, d_after=d_in)


def check_participation(family: RuleFamily, p: Profile, i: int) -> CheckOutcome:
    return _evaluate_participation(family, p, i)


def check_outsider_stability(family: RuleFamily, p: Profile, i: int) -> OutsiderOutcome:
    """Insert the current outcome as an extra voter at position i; the outcome must not move"""
    _require_participation_family(family, p.k)
    y = family.rule(p.k).evaluate(p)
    q = p.insert(i, y)
    deviation = geodesic_distance(family.rule(p.k + 1).evaluate(q), y)
    return OutsiderOutcome(holds=deviation <= EQ_TOL, deviation=deviation)


# ---------------------------------------------------------------------------
# Certificates
# ---------------------------------------------------------------------------

def _twin_certificate(rule: AggregationRule, p: Profile, i: int, j: int) -> Optional[ViolationCertificate]:
    outcome, twinned = _evaluate_twin(rule, p, i, j)
    if outcome.holds:
        return None
    return ViolationCertificate(
        condition=Condition.TWIN, kind=_KIND_OF_STATUS[outcome.status], rule_name=rule.name,
        before_profile=p.to_rows(), after_profile=twinned.to_rows(), focal_voter=i, partner_voter=j,
        d_before=outcome.d_before, d_after=outcome.d_after, margin=outcome.margin,
    )


def _participation_certificate(family: RuleFamily, p: Profile, i: int,
                               partner: Optional[int] = None) -> Optional[ViolationCertificate]:
    outcome = _evaluate_participation(family, p, i)
    if outcome.holds:
        return None
    return ViolationCertificate(
        condition=Condition.PARTICIPATION, kind=_KIND_OF_STATUS[outcome.status], rule_name=family.name,
        before_profile=delete_voter(p, i).to_rows(), after_profile=p.to_rows(), focal_voter=i,
        partner_voter=partner, d_before=outcome.d_before, d_after=outcome.d_after, margin=outcome.margin,
    )


def verify_certificate(cert: ViolationCertificate, target: Union[AggregationRule, RuleFamily]) -> bool:
    """Independent re-evaluation: same distances within 1e-9 and the same kind"""
    try:
        before = Profile.from_rows(cert.before_profile)
        after = Profile.from_rows(cert.after_profile)
        if cert.condition is Condition.TWIN:
            if not isinstance(target, AggregationRule) or cert.partner_voter is None:
                return False
            outcome, twinned = _evaluate_twin(target, before, cert.focal_voter, cert.partner_voter)
            if twinned.to_rows() != after.to_rows():
                return False
        else:
            if not isinstance(target, RuleFamily):
                return False
            if delete_voter(after, cert.focal_voter).to_rows() != before.to_rows():
                return False
            outcome = _evaluate_participation(target, after, cert.focal_voter)
    except (ValueError, IndexError, UndefinedAtProfile) as e:
        logger.debug(f"certificate failed to re-evaluate: {e}")
        return False
    return (
        outcome.status is not CheckStatus.HOLDS
        and _KIND_OF_STATUS[outcome.status] is cert.kind
        and abs(outcome.d_before - cert.d_before) <= EQ_TOL
        and abs(outcome.d_after - cert.d_after) <= EQ_TOL
    )


def _verified(cert: ViolationCertificate, target: Union[AggregationRule, RuleFamily]) -> ViolationCertificate:
    return cert.model_copy(update={"verified": verify_certificate(cert, target)})


def lift_two_slot_certificate(rule: AggregationRule, i: int, j: int,
                              cert: ViolationCertificate) -> ViolationCertificate:
    """Carry a twin certificate of two_slot_rule(rule, i, j) over to rule itself"""
    slots = {1: i, 2: j}

    def embed(rows: List[List[float]]) -> Profile:
        return two_point_profile(rule.k, i, j, SpherePoint(rows[0]), SpherePoint(rows[1]))

    lifted = _twin_certificate(rule, embed(cert.before_profile), slots[cert.focal_voter], slots[cert.partner_voter])
    if lifted is None:
        raise NotAntipodal("the two-slot violation did not lift to the full rule")
    return _verified(lifted, rule)


# ---------------------------------------------------------------------------
# Searches
# ---------------------------------------------------------------------------

class SearchConfig(BaseModel):
    net_size: int = Field(default=settings.SEARCH_NET_SIZE, ge=2)
    refine_steps: int = Field(default=settings.REFINE_STEPS, ge=0)
    restarts: int = Field(default=settings.SEARCH_RESTARTS, ge=0)
    seed: int = settings.DEFAULT_SEED


class SearchDiagnostics(BaseModel):
    profiles_checked: int = 0
    skipped_singular: int = 0
    skipped_precondition: int = 0
    violations_seen: int = 0
    margin_before_refinement: Optional[float] = None
    margin_after_refinement: Optional[float] = None
    net: Dict[str, object] = Field(default_factory=dict)


class SearchOutcome(BaseModel):
    certificate: Optional[ViolationCertificate] = None
    diagnostics: SearchDiagnostics

    @property
    def found(self) -> bool:
        return self.certificate is not None


@dataclass
class _Candidate:
    status: CheckStatus
    margin: float
    profile: Profile
    focal: int
    partner: Optional[int]

    def rank(self) -> tuple:
        # weak before strictness, larger margin first, then lexicographic profile
        kind_rank = 0 if self.status is CheckStatus.WEAK_VIOLATION else 1
        return (kind_rank, -self.margin, tuple(map(tuple, self.profile.to_rows())), self.focal, self.partner or 0)


class _Searcher:
    """Grid slices, coordinate sweeps from random restarts, then local refinement"""

    def __init__(self, check: Callable[[Profile, int, Optional[int]], CheckOutcome],
                 near_singular: Callable[[Profile, int, Optional[int]], bool], diagnostics: SearchDiagnostics):
        self._check = check
        self._near_singular = near_singular
        self.diagnostics = diagnostics
        self.best: Optional[_Candidate] = None

    def score(self, p: Profile, focal: int, partner: Optional[int]) -> Optional[_Candidate]:
        if self._near_singular(p, focal, partner):
            self.diagnostics.skipped_singular += 1
            return None
        self.diagnostics.profiles_checked += 1
        try:
            outcome = self._check(p, focal, partner)
        except UndefinedAtProfile:
            self.diagnostics.skipped_singular += 1
            return None
        except TwinPreconditionViolated:
            self.diagnostics.skipped_precondition += 1
            return None
        cand = _Candidate(outcome.status, outcome.margin, p, focal, partner)
        if outcome.status is not CheckStatus.HOLDS:
            self.diagnostics.violations_seen += 1
            if self.best is None or cand.rank() < self.best.rank():
                self.best = cand
        return cand

    def sweep(self, p: Profile, focal: int, partner: Optional[int], net: SampleNet) -> Profile:
        """One coordinate-wise pass: each slot takes the net point with the largest margin"""
        current = self.score(p, focal, partner)
        for slot in range(1, p.k + 1):
            for x in net.points:
                trial = p.replace(slot, x)
                cand = self.score(trial, focal, partner)
                if cand is not None and (current is None or cand.margin > current.margin):
                    p, current = trial, cand
        return p

    def refine(self, cand: _Candidate, initial_step: float, max_rounds: int) -> _Candidate:
        """Coordinate ascent on the margin with geodesic steps halved down to STEP_FLOOR"""
        step = initial_step
        rounds = 0
        while step >= STEP_FLOOR and rounds < max_rounds:
            rounds += 1
            improved = False
            for slot in range(1, cand.profile.k + 1):
                x = cand.profile.voter(slot)
                moves = [sign * step * d for d in tangent_basis(x) for sign in (1.0, -1.0)]
                for move in moves:
                    trial = cand.profile.replace(slot, exp_map(x, move))
                    nxt = self.score(trial, cand.focal, cand.partner)
                    if nxt is not None and nxt.status is not CheckStatus.HOLDS and nxt.margin > cand.margin:
                        cand, improved = nxt, True
                        break
            if not improved:
                step /= 2.0
        return cand


def _run_search(searcher: _Searcher, slices: Iterator[Tuple[Profile, int, Optional[int]]],
                restarts: Iterator[Tuple[Profile, int, Optional[int]]], net: SampleNet,
                cfg: SearchConfig) -> Optional[_Candidate]:
    for p, focal, partner in slices:
        searcher.score(p, focal, partner)
    for p, focal, partner in restarts:
        searcher.sweep(p, focal, partner, net)
    best = searcher.best
    if best is None:
        return None
    searcher.diagnostics.margin_before_refinement = best.margin
    if cfg.refine_steps > 0:
        best = searcher.refine(best, net.mesh, cfg.refine_steps)
    searcher.diagnostics.margin_after_refinement = best.margin
    return best


def _random_profile(k: int, net: SampleNet, rng: np.random.Generator) -> Profile:
    return Profile(tuple(net.points[int(idx)] for idx in rng.integers(0, len(net), size=k)))


def search_twin_violation(rule: AggregationRule, cfg: Optional[SearchConfig] = None) -> SearchOutcome:
    cfg = cfg or SearchConfig()
    if rule.k < 2:
        raise PreconditionViolated(f"twin search needs k >= 2, got k={rule.k}")
    net = default_net(rule.dim_n, cfg.net_size, cfg.seed)
    diagnostics = SearchDiagnostics(net=net.descriptor())
    def near_singular(p: Profile, i: int, j: int) -> bool:
        return rule.near_singular(p.as_array()) or rule.near_singular(p.replace(j, p.voter(i)).as_array())

    searcher = _Searcher(lambda p, i, j: check_twin(rule, p, i, j), near_singular, diagnostics)
    pairs = [(i, j) for i in range(1, rule.k + 1) for j in range(1, rule.k + 1) if i != j]

    def slices():
        # delta-style slices first: every voter but two sits at e_1
        for i, j in pairs:
            for x in net.points:
                for y in net.points:
                    if x != y:
                        yield two_point_profile(rule.k, i, j, x, y), i, j

    def restarts():
        rng = np.random.default_rng(cfg.seed)
        for _ in range(cfg.restarts):
            i, j = pairs[int(rng.integers(0, len(pairs)))]
            yield _random_profile(rule.k, net, rng), i, j

    logger.info(f"🔍 twin search on {rule.name} (k={rule.k}, n={rule.dim_n}, net={len(net)})")
    best = _run_search(searcher, slices(), restarts(), net, cfg)
    if best is None:
        logger.info("no twin violation at this resolution")
        return SearchOutcome(certificate=None, diagnostics=diagnostics)
    cert = _twin_certificate(rule, best.profile, best.focal, best.partner)
    return SearchOutcome(certificate=_verified(cert, rule), diagnostics=diagnostics)


def search_noshow_violation(family: RuleFamily, k: int, cfg: Optional[SearchConfig] = None) -> SearchOutcome:
    cfg = cfg or SearchConfig()
    _require_participation_family(family, k)
    big = family.rule(k + 1)
    small = family.rule(k)
    net = default_net(family.dim_n, cfg.net_size, cfg.seed)
    diagnostics = SearchDiagnostics(net=net.descriptor())

    def near_singular(p: Profile, i: int, _partner: Optional[int]) -> bool:
        return big.near_singular(p.as_array()) or small.near_singular(delete_voter(p, i).as_array())

    searcher = _Searcher(lambda p, i, _: check_participation(family, p, i), near_singular, diagnostics)
    pairs = [(i, j) for i in range(1, k + 2) for j in range(1, k + 2) if i != j]

    def slices():
        # the focal voter joins at x while one partner sits at y, the rest at e_1
        for i, j in pairs:
            for x in net.points:
                for y in net.points:
                    yield two_point_profile(k + 1, i, j, x, y), i, None

    def restarts():
        rng = np.random.default_rng(cfg.seed)
        for _ in range(cfg.restarts):
            yield _random_profile(k + 1, net, rng), int(rng.integers(1, k + 2)), None

    logger.info(f"🔍 no-show search on {family.name} (k={k}, n={family.dim_n}, net={len(net)})")
    best = _run_search(searcher, slices(), restarts(), net, cfg)
    if best is None:
        logger.info("no participation violation at this resolution")
        return SearchOutcome(certificate=None, diagnostics=diagnostics)
    cert = _participation_certificate(family, best.profile, best.focal)
    return SearchOutcome(certificate=_verified(cert, family), diagnostics=diagnostics)


# ---------------------------------------------------------------------------
# Nowhere Anti-Unanimity
# ---------------------------------------------------------------------------

def scan_nau(g: SphereSelfMap, net: SampleNet, lipschitz_bound: Optional[float] = None) -> NauScanResult:
    """min over the net of d(g(x), -x); certified when the gap beats (1 + L) * mesh"""
    undefined: List[SpherePoint] = []
    best_gap = math.inf
    worst = net.points[0]
    for x in net.points:
        try:
            gx = g(x)
        except UndefinedAtPoint:
            undefined.append(x)
            continue
        gap = geodesic_distance(gx, antipode(x))
        if gap < best_gap:
            best_gap, worst = gap, x
    if undefined:
        raise UndefinedAtPoint(f"{g.provenance} undefined at {len(undefined)} net point(s)",
                               [x.to_list() for x in undefined])
    slack = None if lipschitz_bound is None else best_gap - (1.0 + lipschitz_bound) * net.mesh
    return NauScanResult(
        map_provenance=g.provenance, worst_point=worst.to_list(), gap=best_gap, net=net.descriptor(),
        lipschitz_bound=lipschitz_bound, certified=slack is not None and slack > 0.0, certificate_slack=slack,
    )


class AntipodeConfig(BaseModel):
    multistarts: int = Field(default=settings.MULTISTARTS, ge=1)
    max_iter: int = Field(default=settings.ANTIPODE_MAX_ITER, ge=1)
    tol: float = Field(default=1e-9, gt=0)
    seed: int = settings.DEFAULT_SEED
    screen_size: int = Field(default=64, ge=1)


@dataclass
class AntipodeResult:
    point: Optional[SpherePoint]
    best_point: Optional[SpherePoint]
    residual: float
    starts_used: int

    @property
    def found(self) -> bool:
        return self.point is not None


_FD_STEP = 1e-6


def locate_antipodal_point(g: SphereSelfMap, cfg: Optional[AntipodeConfig] = None) -> AntipodeResult:
    """Multistart descent on phi(x) = 1 + g(x).x, then a pattern-search polish on ||g(x) + x||"""
    cfg = cfg or AntipodeConfig()

    def phi(x: SpherePoint) -> float:
        try:
            return max(0.0, 1.0 + float(np.dot(g(x).coords, x.coords)))
        except UndefinedAtPoint:
            return math.inf

    def chord(x: SpherePoint) -> float:
        try:
            return float(np.linalg.norm(g(x).coords + x.coords))
        except UndefinedAtPoint:
            return math.inf

    screen = default_net(g.dim_n, max(cfg.screen_size, cfg.multistarts), cfg.seed)
    scored = sorted((phi(x), idx) for idx, x in enumerate(screen.points))
    starts = [screen.points[idx] for value, idx in scored[: cfg.multistarts] if math.isfinite(value)]

    best_point, best_value = None, math.inf
    for start in starts:
        x = _descend(phi, start, cfg.max_iter, cfg.tol)
        if phi(x) <= 1e-3:
            x = _pattern_search(chord, x)
        value = phi(x)
        if value < best_value:
            best_point, best_value = x, value
        if best_value <= cfg.tol:
            break
    found = best_point if best_value <= cfg.tol else None
    return AntipodeResult(point=found, best_point=best_point, residual=best_value, starts_used=len(starts))


def _descend(phi: Callable[[SpherePoint], float], x: SpherePoint, max_iter: int, tol: float) -> SpherePoint:
    value = phi(x)
    step = 0.5
    for _ in range(max_iter):
        if value <= tol:
            break
        basis = tangent_basis(x)
        grad = np.zeros_like(x.coords)
        for b in basis:
            slope = (phi(exp_map(x, _FD_STEP * b)) - phi(exp_map(x, -_FD_STEP * b))) / (2.0 * _FD_STEP)
            if math.isfinite(slope):
                grad += slope * b
        norm = float(np.linalg.norm(grad))
        if norm < 1e-14:
            break
        direction = -grad / norm
        while step >= 1e-12:
            trial = exp_map(x, step * direction)
            trial_value = phi(trial)
            if trial_value < value:
                x, value = trial, trial_value
                step = min(1.0, 2.0 * step)
                break
            step /= 2.0
        else:
            break
    return x


def _pattern_search(objective: Callable[[SpherePoint], float], x: SpherePoint,
                    step: float = 1e-3, floor: float = 1e-15) -> SpherePoint:
    value = objective(x)
    while step >= floor and value > 0.0:
        moved = False
        for b in tangent_basis(x):
            for sign in (1.0, -1.0):
                trial = exp_map(x, sign * step * b)
                trial_value = objective(trial)
                if trial_value < value:
                    x, value, moved = trial, trial_value, True
                    break
            if moved:
                break
        if not moved:
            step /= 2.0
    return x


def find_antipodal_point(g: SphereSelfMap, cfg: Optional[AntipodeConfig] = None) -> Optional[SpherePoint]:
    return locate_antipodal_point(g, cfg).point


def _require_antipodal(image: SpherePoint, x0: SpherePoint, what: str) -> None:
    gap = geodesic_distance(image, antipode(x0))
    if gap > WITNESS_TOL:
        raise NotAntipodal(f"{what} sends x0 to distance {gap:.3e} from -x0 (needs <= {WITNESS_TOL})")


def twin_witness_from_antipode(rule: AggregationRule, i: int, j: int, x0: SpherePoint, y: SpherePoint,
                               embedding: str = "pair") -> ViolationCertificate:
    """Twin violation from an antipodal point

    ``embedding="pair"``: f_{i,j}(x0) = -x0; before has x0 in slot i, y in
    slot j and e_1 elsewhere. ``embedding="diagonal"``: f(x0,..,x0) = -x0;
    before has x0 everywhere except y in slot j. Twinning restores the
    antipodal profile, whose outcome sits at distance pi from x0.
    """
    if i == j:
        raise IndexOutOfRange(f"witness needs distinct voters, got i=j={i}")
    if embedding == "pair":
        _require_antipodal(restrict_pair(rule, i, j)(x0), x0, f"f_{{{i},{j}}}")
        before = two_point_profile(rule.k, i, j, x0, y)
    elif embedding == "diagonal":
        _require_antipodal(rule.evaluate(Profile((x0,) * rule.k)), x0, "the diagonal")
        before = Profile((x0,) * rule.k).replace(j, y)
    else:
        raise ValueError(f"embedding must be 'pair' or 'diagonal', got {embedding!r}")
    if geodesic_distance(x0, y) <= EQ_TOL:
        raise TwinPreconditionViolated("y must differ from x0")
    cert = _twin_certificate(rule, before, i, j)
    if cert is None:
        raise NotAntipodal("the antipodal profile did not produce a twin violation on re-evaluation")
    return _verified(cert, rule)


def noshow_witness_from_antipode(family: RuleFamily, k: int, i: int, j: int, x0: SpherePoint) -> ViolationCertificate:
    """Participation violation from f^(k+1)_{i,j}(x0) = -x0: voter j joins voter i at x0"""
    _require_participation_family(family, k)
    big = family.rule(k + 1)
    _require_antipodal(restrict_pair(big, i, j)(x0), x0, f"f^({k + 1})_{{{i},{j}}}")
    joined = twin_embedding(k + 1, min(i, j), max(i, j), x0)
    cert = _participation_certificate(family, joined, j, partner=i)
    if cert is None:
        raise NotAntipodal("the antipodal profile did not produce a participation violation on re-evaluation")
    return _verified(cert, family)
