import math

import numpy as np

from core.rules import Profile, SphereSelfMap
from core.sphere_core import SpherePoint, normalize


def angle_deg(x: SpherePoint) -> float:
    return math.degrees(math.atan2(float(x.coords[1]), float(x.coords[0]))) % 360.0


def circle_profile(*degrees: float) -> Profile:
    return Profile.from_angles(degrees)


def wobble(amplitude: float, phase: float) -> SphereSelfMap:
    """theta -> theta + a*sin(theta + b): degree 1 and never antipodal when |a| < pi"""
    def fn(x: SpherePoint) -> SpherePoint:
        theta = math.atan2(float(x.coords[1]), float(x.coords[0]))
        return SpherePoint.from_angle(theta + amplitude * math.sin(theta + phase))
    return SphereSelfMap(fn, 1, f"wobble({amplitude:.3f}, {phase:.3f})", 1.0 + abs(amplitude))


def linear_map(matrix) -> SphereSelfMap:
    A = np.asarray(matrix, dtype=float)
    return SphereSelfMap(lambda x: normalize(A @ x.coords), A.shape[0] - 1, "linear")
