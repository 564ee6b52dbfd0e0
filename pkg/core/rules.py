"""
Aggregation rules on S^n

A rule maps a profile of k preferences (points on S^n) to a social outcome.
This module holds the builtin rule catalog, rule families indexed by the
number of voters, and the embeddings that restrict a rule to a self-map of
S^n: x placed in slots i and j (f_{i,j}) or in slot alpha alone (f_alpha),
with the basepoint e_1 everywhere else.
"""

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from core.errors import (
    AntipodalPair,
    BadParams,
    DimensionMismatch,
    IndexOutOfRange,
    UndefinedAtPoint,
    UndefinedAtProfile,
)
from core.sphere_core import ZERO_TOL, SpherePoint, e1, exp_map, log_map

# Profiles closer than this to a mean-type rule's singular set are skipped by searches
SINGULAR_MARGIN = 1e-6
KARCHER_RESIDUAL_TOL = 1e-8


class Totality(str, Enum):
    TOTAL_CONTINUOUS = "total_continuous"
    PARTIAL = "partial"
    TOTAL_DISCONTINUOUS = "total_discontinuous"


@dataclass(frozen=True)
class Profile:
    """Ordered preferences x_1..x_k; ``voter(i)`` is 1-based like the reports"""

    points: Tuple[SpherePoint, ...]

    def __post_init__(self):
        if len(self.points) < 1:
            raise ValueError("a profile needs at least one voter")
        dims = {p.dim_n for p in self.points}
        if len(dims) != 1:
            raise DimensionMismatch(f"profile mixes sphere dimensions {sorted(dims)}")

    @classmethod
    def of(cls, points: Iterable[SpherePoint]) -> "Profile":
        return cls(tuple(points))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]]) -> "Profile":
        return cls(tuple(SpherePoint(r) for r in rows))

    @classmethod
    def from_angles(cls, degrees: Sequence[float]) -> "Profile":
        """Profile on S^1 from angles given in degrees"""
        return cls(tuple(SpherePoint.from_angle(math.radians(a)) for a in degrees))

    @property
    def k(self) -> int:
        return len(self.points)

    @property
    def dim_n(self) -> int:
        return self.points[0].dim_n

    def voter(self, i: int) -> SpherePoint:
        self._check_index(i)
        return self.points[i - 1]

    def replace(self, i: int, x: SpherePoint) -> "Profile":
        self._check_index(i)
        pts = list(self.points)
        pts[i - 1] = x
        return Profile(tuple(pts))

    def insert(self, i: int, x: SpherePoint) -> "Profile":
        """New profile with x as voter i (1 <= i <= k+1)"""
        if not 1 <= i <= self.k + 1:
            raise IndexOutOfRange(f"insertion position {i} outside 1..{self.k + 1}")
        pts = list(self.points)
        pts.insert(i - 1, x)
        return Profile(tuple(pts))

    def as_array(self) -> np.ndarray:
        return np.array([p.coords for p in self.points])

    def to_rows(self) -> List[List[float]]:
        return [p.to_list() for p in self.points]

    def _check_index(self, i: int) -> None:
        if not 1 <= i <= self.k:
            raise IndexOutOfRange(f"voter index {i} outside 1..{self.k}")


class AggregationRule(ABC):
    """A map (S^n)^k -> S^n with metadata

    ``lipschitz_bound`` is measured from the max-over-voters geodesic metric
    on (S^n)^k to the geodesic metric on S^n, so every restriction f_{i,j},
    f_alpha inherits it.
    """

    name: str = "rule"
    totality_claim: Totality = Totality.TOTAL_CONTINUOUS
    allowed_params: Tuple[str, ...] = ()

    def __init__(self, k: int, dim_n: int, params: Optional[Dict[str, Any]] = None,
                 lipschitz_bound: Optional[float] = None):
        if k < 1:
            raise BadParams(f"voter count k must be >= 1, got {k}")
        if dim_n < 1:
            raise BadParams(f"sphere dimension n must be >= 1, got {dim_n}")
        self.k = k
        self.dim_n = dim_n
        self.params: Dict[str, Any] = dict(params or {})
        _check_keys(self.name, self.params, self.allowed_params)
        self.lipschitz_bound = lipschitz_bound

    @abstractmethod
    def _aggregate(self, X: np.ndarray) -> np.ndarray:
        """Outcome for a (k, n+1) array of unit rows; may raise UndefinedAtProfile"""

    def near_singular(self, X: np.ndarray, margin: float = SINGULAR_MARGIN) -> bool:
        return False

    def evaluate(self, p: Profile) -> SpherePoint:
        if p.k != self.k:
            raise DimensionMismatch(f"{self.name} takes {self.k} voters, profile has {p.k}")
        if p.dim_n != self.dim_n:
            raise DimensionMismatch(f"{self.name} lives on S^{self.dim_n}, profile on S^{p.dim_n}")
        out = np.array(self._aggregate(p.as_array()), dtype=float)
        return SpherePoint._trusted(out)

    def __call__(self, p: Profile) -> SpherePoint:
        return self.evaluate(p)

    def spec(self) -> "RuleSpec":
        return RuleSpec(name=self.name, k=self.k, dim_n=self.dim_n, params=self.params)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(k={self.k}, dim_n={self.dim_n}, params={self.params})"


def _winner(params: Dict[str, Any], k: int) -> int:
    winner = params.get("winner", 1)
    if not isinstance(winner, int) or isinstance(winner, bool) or not 1 <= winner <= k:
        raise BadParams(f"winner must be an integer in 1..{k}, got {winner!r}")
    return winner


def _check_keys(rule_name: str, params: Dict[str, Any], allowed: Tuple[str, ...]) -> None:
    extra = sorted(set(params) - set(allowed))
    if extra:
        raise BadParams(f"{rule_name} does not take {extra}; allowed parameters are {list(allowed)}")


def _rotation(dim_n: int, angle: float) -> np.ndarray:
    """Rotation by ``angle`` in the (1,2)-coordinate plane of R^{n+1}"""
    R = np.eye(dim_n + 1)
    c, s = math.cos(angle), math.sin(angle)
    R[0, 0], R[0, 1], R[1, 0], R[1, 1] = c, -s, s, c
    return R


def _unit_sum(X: np.ndarray, rule_name: str) -> np.ndarray:
    s = X.sum(axis=0)
    norm = float(np.linalg.norm(s))
    if norm <= ZERO_TOL:
        raise UndefinedAtProfile(f"{rule_name}: preference vectors sum to zero (norm {norm:.2e})")
    return s / norm


class DictatorRule(AggregationRule):
    name = "dictator"
    allowed_params: Tuple[str, ...] = ("winner",)

    def __init__(self, k: int, dim_n: int, params: Optional[Dict[str, Any]] = None):
        params = dict(params or {})
        params["winner"] = _winner(params, k)
        super().__init__(k, dim_n, params, lipschitz_bound=1.0)
        self.winner = params["winner"]

    def _aggregate(self, X: np.ndarray) -> np.ndarray:
        return X[self.winner - 1].copy()


class ConstantRule(AggregationRule):
    name = "constant"
    allowed_params: Tuple[str, ...] = ("c",)

    def __init__(self, k: int, dim_n: int, params: Optional[Dict[str, Any]] = None):
        params = dict(params or {})
        raw = params.get("c")
        try:
            c = e1(dim_n) if raw is None else SpherePoint(raw)
        except (ValueError, TypeError) as e:
            raise BadParams(f"constant: c must be a unit vector, {e}") from e
        if c.dim_n != dim_n:
            raise BadParams(f"constant: c lives on S^{c.dim_n}, rule on S^{dim_n}")
        params["c"] = c.to_list()
        super().__init__(k, dim_n, params, lipschitz_bound=0.0)
        self.c = c

    def _aggregate(self, X: np.ndarray) -> np.ndarray:
        return self.c.coords.copy()


class NormalizedMeanRule(AggregationRule):
    name = "normalized_mean"
    totality_claim = Totality.PARTIAL

    def _aggregate(self, X: np.ndarray) -> np.ndarray:
        return _unit_sum(X, self.name)

    def near_singular(self, X: np.ndarray, margin: float = SINGULAR_MARGIN) -> bool:
        return float(np.linalg.norm(X.sum(axis=0))) <= margin


class AntagonisticMeanRule(NormalizedMeanRule):
    """Antipode of the normalized mean; anti-unanimous on the whole diagonal"""

    name = "antagonistic_mean"

    def _aggregate(self, X: np.ndarray) -> np.ndarray:
        return -_unit_sum(X, self.name)


class KarcherMeanRule(NormalizedMeanRule):
    """Riemannian center of mass by gradient descent from the normalized mean"""

    name = "karcher_mean"
    allowed_params: Tuple[str, ...] = ("max_iter", "step_tol")

    def __init__(self, k: int, dim_n: int, params: Optional[Dict[str, Any]] = None):
        params = dict(params or {})
        params.setdefault("max_iter", 200)
        params.setdefault("step_tol", 1e-10)
        if int(params["max_iter"]) < 1 or float(params["step_tol"]) <= 0:
            raise BadParams(f"karcher_mean: need max_iter >= 1 and step_tol > 0, got {params}")
        super().__init__(k, dim_n, params)
        self.max_iter = int(params["max_iter"])
        self.step_tol = float(params["step_tol"])

    def _aggregate(self, X: np.ndarray) -> np.ndarray:
        m = SpherePoint._trusted(_unit_sum(X, self.name))
        points = [SpherePoint._trusted(row.copy()) for row in X]
        for _ in range(self.max_iter):
            grad = self._mean_log(m, points)
            # unit step on the mean of the logs
            m = exp_map(m, grad)
            if float(np.linalg.norm(grad)) < self.step_tol:
                break
        residual = float(np.linalg.norm(self._mean_log(m, points) * len(points)))
        if residual > KARCHER_RESIDUAL_TOL:
            raise UndefinedAtProfile(f"{self.name}: no stationary point reached (residual {residual:.2e})")
        return m.coords.copy()

    def _mean_log(self, m: SpherePoint, points: List[SpherePoint]) -> np.ndarray:
        try:
            return sum(log_map(m, x) for x in points) / len(points)
        except AntipodalPair as e:
            raise UndefinedAtProfile(f"{self.name}: a preference is antipodal to the iterate") from e

    @staticmethod
    def stationarity_residual(m: SpherePoint, p: Profile) -> float:
        return float(np.linalg.norm(sum(log_map(m, x) for x in p.points)))


class RotatedDictatorRule(AggregationRule):
    """The winner's preference rotated in the (1,2)-plane; ignores unanimity"""

    name = "rotated_dictator"
    allowed_params: Tuple[str, ...] = ("winner", "rotation_angle", "angle")

    def __init__(self, k: int, dim_n: int, params: Optional[Dict[str, Any]] = None):
        params = dict(params or {})
        params["winner"] = _winner(params, k)
        angle = params.get("rotation_angle", params.pop("angle", 0.0))
        try:
            params["rotation_angle"] = float(angle)
        except (TypeError, ValueError) as e:
            raise BadParams(f"rotated_dictator: rotation_angle must be a real number, got {angle!r}") from e
        super().__init__(k, dim_n, params, lipschitz_bound=1.0)
        self.winner = params["winner"]
        self.rotation = _rotation(dim_n, params["rotation_angle"])

    def _aggregate(self, X: np.ndarray) -> np.ndarray:
        out = self.rotation @ X[self.winner - 1]
        return out / np.linalg.norm(out)


class CallableRule(AggregationRule):
    """Wraps a Python callable on (k, n+1) arrays; used to build test families"""

    def __init__(self, name: str, k: int, dim_n: int, fn: Callable[[np.ndarray], np.ndarray],
                 totality_claim: Totality = Totality.TOTAL_CONTINUOUS,
                 lipschitz_bound: Optional[float] = None):
        super().__init__(k, dim_n, {}, lipschitz_bound=lipschitz_bound)
        self.name = name
        self.totality_claim = totality_claim
        self._fn = fn

    def _aggregate(self, X: np.ndarray) -> np.ndarray:
        out = np.asarray(self._fn(X), dtype=float)
        norm = float(np.linalg.norm(out))
        if norm <= ZERO_TOL:
            raise UndefinedAtProfile(f"{self.name}: callable returned a zero vector")
        return out / norm


BUILTINS: Dict[str, type] = {
    "dictator": DictatorRule,
    "constant": ConstantRule,
    "normalized_mean": NormalizedMeanRule,
    "antagonistic_mean": AntagonisticMeanRule,
    "karcher_mean": KarcherMeanRule,
    "rotated_dictator": RotatedDictatorRule,
}


class RuleSpec(BaseModel):
    """Rule specification record as it appears in configs and reports"""

    model_config = ConfigDict(extra="forbid")

    name: str
    k: int
    dim_n: int
    params: Dict[str, Any] = Field(default_factory=dict)


def make_builtin(name: str, k: int, dim_n: int, params: Optional[Dict[str, Any]] = None) -> AggregationRule:
    cls = BUILTINS.get(name)
    if cls is None:
        raise BadParams(f"unknown rule {name!r}; builtins are {sorted(BUILTINS)}")
    return cls(k, dim_n, dict(params or {}))


def rule_from_spec(spec: RuleSpec) -> AggregationRule:
    return make_builtin(spec.name, spec.k, spec.dim_n, spec.params)


class RuleFamily:
    """Rules f^(k) indexed by the number of voters"""

    def __init__(self, name: str, dim_n: int, generator: Callable[[int], AggregationRule], k_min: int = 2):
        if k_min < 2:
            raise BadParams(f"a rule family starts at k >= 2, got k_min={k_min}")
        self.name = name
        self.dim_n = dim_n
        self.k_min = k_min
        self._generator = generator
        self._cache: Dict[int, AggregationRule] = {}

    def supports(self, k: int) -> bool:
        return k >= self.k_min

    def rule(self, k: int) -> AggregationRule:
        if not self.supports(k):
            raise BadParams(f"family {self.name} starts at k={self.k_min}, asked for k={k}")
        if k not in self._cache:
            rule = self._generator(k)
            if rule.k != k or rule.dim_n != self.dim_n:
                raise BadParams(f"family {self.name} generated a rule with k={rule.k}, n={rule.dim_n} for k={k}")
            self._cache[k] = rule
        return self._cache[k]

    def __repr__(self) -> str:
        return f"RuleFamily({self.name!r}, dim_n={self.dim_n}, k_min={self.k_min})"


def make_builtin_family(name: str, dim_n: int, params: Optional[Dict[str, Any]] = None) -> RuleFamily:
    params = dict(params or {})
    make_builtin(name, 2, dim_n, params)  # validate params once, up front
    return RuleFamily(name, dim_n, lambda k: make_builtin(name, k, dim_n, params))


def family_from_spec(spec: RuleSpec) -> RuleFamily:
    return make_builtin_family(spec.name, spec.dim_n, spec.params)


class SphereSelfMap:
    """A map S^n -> S^n with a provenance tag"""

    def __init__(self, fn: Callable[[SpherePoint], SpherePoint], dim_n: int, provenance: str = "raw",
                 lipschitz_bound: Optional[float] = None):
        self._fn = fn
        self.dim_n = dim_n
        self.provenance = provenance
        self.lipschitz_bound = lipschitz_bound

    def __call__(self, x: SpherePoint) -> SpherePoint:
        if x.dim_n != self.dim_n:
            raise DimensionMismatch(f"{self.provenance} lives on S^{self.dim_n}, got a point on S^{x.dim_n}")
        return self._fn(x)

    def compose(self, inner: "SphereSelfMap") -> "SphereSelfMap":
        """self o inner"""
        return SphereSelfMap(lambda x: self(inner(x)), self.dim_n, f"{self.provenance} o {inner.provenance}",
                             None if self.lipschitz_bound is None or inner.lipschitz_bound is None
                             else self.lipschitz_bound * inner.lipschitz_bound)

    @classmethod
    def identity(cls, dim_n: int) -> "SphereSelfMap":
        return cls(lambda x: x, dim_n, "identity", 1.0)

    @classmethod
    def antipodal(cls, dim_n: int) -> "SphereSelfMap":
        return cls(lambda x: -x, dim_n, "antipodal", 1.0)

    @classmethod
    def constant(cls, c: SpherePoint) -> "SphereSelfMap":
        return cls(lambda x: c, c.dim_n, f"constant {c.to_list()}", 0.0)

    @classmethod
    def circle_power(cls, m: int) -> "SphereSelfMap":
        """z -> z^m on S^1, i.e. theta -> m*theta"""
        def fn(x: SpherePoint) -> SpherePoint:
            theta = math.atan2(float(x.coords[1]), float(x.coords[0]))
            return SpherePoint.from_angle(m * theta)
        return cls(fn, 1, f"theta -> {m}*theta", float(abs(m)))

    def __repr__(self) -> str:
        return f"SphereSelfMap({self.provenance!r}, dim_n={self.dim_n})"


def _check_k(k: int, *indices: int) -> None:
    for idx in indices:
        if not 1 <= idx <= k:
            raise IndexOutOfRange(f"voter index {idx} outside 1..{k}")


def twin_embedding(k: int, i: int, j: int, x: SpherePoint) -> Profile:
    """delta^(k)_{i,j}(x): x in slots i and j, e_1 elsewhere"""
    if k < 2:
        raise IndexOutOfRange(f"twin embedding needs k >= 2, got k={k}")
    if not i < j:
        raise IndexOutOfRange(f"twin embedding needs i < j, got i={i}, j={j}")
    _check_k(k, i, j)
    base = e1(x.dim_n)
    return Profile(tuple(x if slot in (i, j) else base for slot in range(1, k + 1)))


def coordinate_embedding(k: int, alpha: int, x: SpherePoint) -> Profile:
    _check_k(k, alpha)
    base = e1(x.dim_n)
    return Profile(tuple(x if slot == alpha else base for slot in range(1, k + 1)))


def two_point_profile(k: int, i: int, j: int, x: SpherePoint, y: SpherePoint) -> Profile:
    """e_1 everywhere except x in slot i and y in slot j (i != j, any order)"""
    if i == j:
        raise IndexOutOfRange(f"slots must differ, got i=j={i}")
    _check_k(k, i, j)
    base = e1(x.dim_n)
    return Profile(tuple(x if s == i else y if s == j else base for s in range(1, k + 1)))


def _restricted(rule: AggregationRule, embed: Callable[[SpherePoint], Profile], provenance: str) -> SphereSelfMap:
    def fn(x: SpherePoint) -> SpherePoint:
        try:
            return rule.evaluate(embed(x))
        except UndefinedAtProfile as e:
            raise UndefinedAtPoint(f"{provenance} undefined at {x.to_list()}: {e}", [x]) from e
    return SphereSelfMap(fn, rule.dim_n, provenance, rule.lipschitz_bound)


def restrict_pair(rule: AggregationRule, i: int, j: int) -> SphereSelfMap:
    if i > j:
        i, j = j, i
    # validate eagerly so a bad pair fails here, not at first evaluation
    twin_embedding(rule.k, i, j, e1(rule.dim_n))
    return _restricted(rule, lambda x: twin_embedding(rule.k, i, j, x), f"f_{{{i},{j}}} of {rule.name}")


def restrict_coordinate(rule: AggregationRule, alpha: int) -> SphereSelfMap:
    _check_k(rule.k, alpha)
    return _restricted(rule, lambda x: coordinate_embedding(rule.k, alpha, x), f"f_{alpha} of {rule.name}")


def diagonal_map(rule: AggregationRule) -> SphereSelfMap:
    """x -> f(x, ..., x)"""
    return _restricted(rule, lambda x: Profile((x,) * rule.k), f"diagonal of {rule.name}")


def two_slot_rule(rule: AggregationRule, i: int, j: int) -> AggregationRule:
    """(x, y) -> f(e_1, .., x, .., y, .., e_1) with x in slot i and y in slot j"""
    _check_k(rule.k, i, j)
    if i == j:
        raise IndexOutOfRange(f"slots must differ, got i=j={i}")
    base = e1(rule.dim_n).coords

    def fn(X: np.ndarray) -> np.ndarray:
        full = np.tile(base, (rule.k, 1))
        full[i - 1] = X[0]
        full[j - 1] = X[1]
        return rule._aggregate(full)

    two = CallableRule(f"{rule.name}~({i},{j})", 2, rule.dim_n, fn, rule.totality_claim, rule.lipschitz_bound)
    two.params = {"source": rule.name, "i": i, "j": j}
    return two


def delete_voter(p: Profile, i: int) -> Profile:
    if p.k < 2:
        raise IndexOutOfRange(f"cannot remove a voter from a profile of {p.k}")
    p._check_index(i)
    return Profile(p.points[: i - 1] + p.points[i:])
