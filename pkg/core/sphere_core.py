"""
Sphere Core

Points on S^n as unit vectors in R^{n+1}, the great-circle metric, antipodes,
sample nets with a known covering radius, and the normalized straight-line
(chord) homotopy between x and g(x).
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Optional

import numpy as np

from core.errors import AntipodalPair, DimensionMismatch, NearZeroVector, UnsupportedDimension

UNIT_TOL = 1e-9
ZERO_TOL = 1e-12
ANTIPODE_TOL = 1e-9

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


class SpherePoint:
    """Unit vector in R^{n+1}; coordinates are read-only"""

    __slots__ = ("coords",)

    def __init__(self, coords: Iterable[float]):
        arr = np.array(coords, dtype=float)
        if arr.ndim != 1 or arr.shape[0] < 2:
            raise DimensionMismatch(f"a point on S^n needs n+1 >= 2 coordinates, got shape {arr.shape}")
        norm = float(np.linalg.norm(arr))
        if abs(norm - 1.0) > UNIT_TOL:
            raise ValueError(f"coordinates have norm {norm!r}, expected 1 within {UNIT_TOL}")
        arr.setflags(write=False)
        self.coords = arr

    @classmethod
    def _trusted(cls, arr: np.ndarray) -> "SpherePoint":
        # Skips validation; callers guarantee a unit-norm float vector they own.
        point = object.__new__(cls)
        arr.setflags(write=False)
        point.coords = arr
        return point

    @classmethod
    def basis(cls, dim_n: int, index: int = 1) -> "SpherePoint":
        """e_index (1-based) on S^dim_n"""
        if not 1 <= index <= dim_n + 1:
            raise ValueError(f"basis index {index} outside 1..{dim_n + 1}")
        arr = np.zeros(dim_n + 1)
        arr[index - 1] = 1.0
        return cls._trusted(arr)

    @classmethod
    def from_angle(cls, theta: float) -> "SpherePoint":
        return cls._trusted(np.array([math.cos(theta), math.sin(theta)]))

    @property
    def dim_n(self) -> int:
        return self.coords.shape[0] - 1

    def to_list(self) -> List[float]:
        return [float(c) for c in self.coords]

    def __neg__(self) -> "SpherePoint":
        return antipode(self)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SpherePoint):
            return NotImplemented
        return self.coords.shape == other.coords.shape and bool(np.array_equal(self.coords, other.coords))

    def __hash__(self) -> int:
        return hash(tuple(self.coords.tolist()))

    def __repr__(self) -> str:
        return f"SpherePoint({self.to_list()})"


def e1(dim_n: int) -> SpherePoint:
    """The basepoint (1, 0, ..., 0)"""
    return SpherePoint.basis(dim_n, 1)


def _check_same_dim(x: SpherePoint, y: SpherePoint) -> None:
    if x.dim_n != y.dim_n:
        raise DimensionMismatch(f"points live on S^{x.dim_n} and S^{y.dim_n}")


# Beyond this |x.y|, arccos loses about sqrt(ulp); switch to the chord form
CHORD_SWITCH = 1.0 - 1e-4


def geodesic_distance(x: SpherePoint, y: SpherePoint) -> float:
    """arccos(x.y) with the dot clamped to [-1, 1], evaluated through the chord near 0 and pi"""
    _check_same_dim(x, y)
    dot = float(np.dot(x.coords, y.coords))
    if dot > CHORD_SWITCH:
        return 2.0 * math.asin(min(1.0, float(np.linalg.norm(x.coords - y.coords)) / 2.0))
    if dot < -CHORD_SWITCH:
        return math.pi - 2.0 * math.asin(min(1.0, float(np.linalg.norm(x.coords + y.coords)) / 2.0))
    return math.acos(min(1.0, max(-1.0, dot)))


def geodesic_distance_batch(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Row-wise distances between two (m, n+1) arrays of unit vectors"""
    if xs.shape != ys.shape:
        raise DimensionMismatch(f"batch shapes differ: {xs.shape} vs {ys.shape}")
    dots = np.einsum("ij,ij->i", xs, ys)
    near = 2.0 * np.arcsin(np.minimum(1.0, np.linalg.norm(xs - ys, axis=1) / 2.0))
    far = np.pi - 2.0 * np.arcsin(np.minimum(1.0, np.linalg.norm(xs + ys, axis=1) / 2.0))
    mid = np.arccos(np.clip(dots, -1.0, 1.0))
    return np.where(dots > CHORD_SWITCH, near, np.where(dots < -CHORD_SWITCH, far, mid))


def normalize(v: Iterable[float]) -> SpherePoint:
    arr = np.array(v, dtype=float)
    norm = float(np.linalg.norm(arr))
    if norm <= ZERO_TOL:
        raise NearZeroVector(norm)
    return SpherePoint._trusted(arr / norm)


def antipode(x: SpherePoint) -> SpherePoint:
    return SpherePoint._trusted(-x.coords)


def is_antipodal(x: SpherePoint, y: SpherePoint, tol: float = ANTIPODE_TOL) -> bool:
    return math.pi - geodesic_distance(x, y) <= tol


def chord_homotopy(t: float, x: SpherePoint, gx: SpherePoint) -> SpherePoint:
    """h(t, x) = (t.g(x) + (1-t).x) / ||t.g(x) + (1-t).x||"""
    _check_same_dim(x, gx)
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"homotopy parameter t={t} outside [0, 1]")
    if is_antipodal(x, gx):
        raise AntipodalPair("g(x) is the antipode of x, the chord through the origin cannot be normalized")
    if t == 0.0:
        return x
    if t == 1.0:
        return gx
    return normalize(t * gx.coords + (1.0 - t) * x.coords)


def angle_of(x: SpherePoint) -> float:
    """Angle in [0, 2*pi) of a point on S^1"""
    if x.dim_n != 1:
        raise UnsupportedDimension(f"angles are defined on S^1 only, got S^{x.dim_n}")
    theta = math.atan2(float(x.coords[1]), float(x.coords[0]))
    return theta + 2.0 * math.pi if theta < 0.0 else theta


def tangent_basis(x: SpherePoint) -> np.ndarray:
    """Orthonormal basis (n, n+1) of the tangent space at x"""
    n1 = x.coords.shape[0]
    # Gram-Schmidt on [x, e_1, ..., e_{n+1}]; drop the x direction
    basis: List[np.ndarray] = []
    frame = [x.coords]
    for idx in np.argsort(np.abs(x.coords)):
        v = np.zeros(n1)
        v[idx] = 1.0
        for u in frame:
            v = v - np.dot(v, u) * u
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            v = v / norm
            frame.append(v)
            basis.append(v)
        if len(basis) == n1 - 1:
            break
    return np.array(basis)


def exp_map(x: SpherePoint, v: np.ndarray) -> SpherePoint:
    """Follow the geodesic from x with tangent velocity v for unit time"""
    theta = float(np.linalg.norm(v))
    if theta < ZERO_TOL:
        return x
    out = math.cos(theta) * x.coords + math.sin(theta) * (v / theta)
    return SpherePoint._trusted(out / np.linalg.norm(out))


def log_map(m: SpherePoint, x: SpherePoint) -> np.ndarray:
    """Tangent vector at m pointing to x with length d(m, x); undefined at -m"""
    _check_same_dim(m, x)
    dot = float(np.clip(np.dot(m.coords, x.coords), -1.0, 1.0))
    theta = math.acos(dot)
    if math.pi - theta <= ANTIPODE_TOL:
        raise AntipodalPair("log map is undefined at the antipode of the base point")
    w = x.coords - dot * m.coords
    w_norm = float(np.linalg.norm(w))
    if w_norm < ZERO_TOL:
        return np.zeros_like(m.coords)
    return theta * w / w_norm


def random_points(dim_n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """(count, n+1) array of rotation-invariant random unit vectors"""
    raw = rng.standard_normal((count, dim_n + 1))
    norms = np.linalg.norm(raw, axis=1, keepdims=True)
    # Standard normals landing within 1e-12 of the origin are redrawn
    while np.any(norms <= ZERO_TOL):
        bad = (norms <= ZERO_TOL)[:, 0]
        raw[bad] = rng.standard_normal((int(bad.sum()), dim_n + 1))
        norms = np.linalg.norm(raw, axis=1, keepdims=True)
    return raw / norms


class NetKind(str, Enum):
    CIRCLE_GRID = "circle_grid"
    FIBONACCI_S2 = "fibonacci_s2"
    UNIFORM_RANDOM = "uniform_random"


@dataclass(frozen=True)
class SampleNet:
    points: tuple
    mesh: float
    kind: NetKind
    seed: Optional[int] = None

    @property
    def dim_n(self) -> int:
        return self.points[0].dim_n

    def __len__(self) -> int:
        return len(self.points)

    def as_array(self) -> np.ndarray:
        return np.array([p.coords for p in self.points])

    def descriptor(self) -> dict:
        return {"kind": self.kind.value, "size": len(self.points), "mesh": self.mesh, "seed": self.seed}


def build_net(dim_n: int, size: int, kind: "NetKind | str" = NetKind.CIRCLE_GRID, seed: Optional[int] = None) -> SampleNet:
    kind = NetKind(kind)
    if size < 1:
        raise ValueError(f"net size must be positive, got {size}")

    if kind is NetKind.CIRCLE_GRID:
        if dim_n != 1:
            raise UnsupportedDimension(f"circle_grid lives on S^1, got n={dim_n}")
        points = tuple(SpherePoint.from_angle(2.0 * math.pi * t / size) for t in range(size))
        return SampleNet(points=points, mesh=math.pi / size, kind=kind, seed=seed)

    if kind is NetKind.FIBONACCI_S2:
        if dim_n != 2:
            raise UnsupportedDimension(f"fibonacci_s2 lives on S^2, got n={dim_n}")
        points = []
        for i in range(size):
            z = 1.0 - (2.0 * i + 1.0) / size
            r = math.sqrt(max(0.0, 1.0 - z * z))
            phi = i * GOLDEN_ANGLE
            points.append(normalize([r * math.cos(phi), r * math.sin(phi), z]))
        # Conservative bound, not the exact covering radius
        mesh = min(math.pi, 2.0 * math.sqrt(4.0 * math.pi / size))
        return SampleNet(points=tuple(points), mesh=mesh, kind=kind, seed=seed)

    rng = np.random.default_rng(seed)
    rows = random_points(dim_n, size, rng)
    points = tuple(SpherePoint._trusted(row.copy()) for row in rows)
    # A random net guarantees nothing better than the diameter
    return SampleNet(points=points, mesh=math.pi, kind=kind, seed=seed)


def default_net(dim_n: int, size: int, seed: Optional[int] = None) -> SampleNet:
    """The structured net for S^1 / S^2, uniform random beyond"""
    if dim_n == 1:
        return build_net(1, size, NetKind.CIRCLE_GRID, seed)
    if dim_n == 2:
        return build_net(2, size, NetKind.FIBONACCI_S2, seed)
    return build_net(dim_n, size, NetKind.UNIFORM_RANDOM, seed)
