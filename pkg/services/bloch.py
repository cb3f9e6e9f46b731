"""
Qubit states on the Bloch sphere: geometry, distinguishability, epsilon-grids and rotations.

States use the half-angle convention |psi> = cos(theta)|+> + e^{i phi} sin(theta)|->,
so the Bloch polar angle is 2*theta. Every "Bloch angle" below is a great-circle
angle on the sphere, never the theta parameter itself.
"""
import logging
import math
from typing import Optional, Sequence, Union

import numpy as np
from scipy.spatial import ConvexHull

from schemas.states import HALF_PI, TWO_PI, BlochVector, PureQubit, SphereGrid
from utils.cache import cached
from utils.validation import DomainError, require_finite, require_int, require_range

logger = logging.getLogger(__name__)

# Fibonacci points per steradian-squared: N = ceil(GRID_DENSITY / eps^2)
GRID_DENSITY = 8.0 * math.pi
GRID_GROWTH = 1.25
AXIS_NORM_TOLERANCE = 1e-9
_GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))

AxisLike = Union[BlochVector, Sequence[float], np.ndarray]


# --- states and vectors ---

def from_angles(theta, phi) -> PureQubit:
    """Canonical PureQubit for arbitrary finite (theta, phi)"""
    theta = require_finite("theta", theta)
    phi = require_finite("phi", phi)

    # reduce the Bloch polar angle 2*theta into [0, pi]; reflecting it flips the phase
    polar = math.fmod(2.0 * theta, TWO_PI)
    if polar < 0.0:
        polar += TWO_PI
    if polar > math.pi:
        polar = TWO_PI - polar
        phi += math.pi

    theta = min(0.5 * polar, HALF_PI)
    phi = _wrap_phase(phi)
    if theta == 0.0:
        phi = 0.0
    return PureQubit(theta=theta, phi=phi)


def _wrap_phase(phi: float) -> float:
    phi = math.fmod(phi, TWO_PI)
    if phi < 0.0:
        phi += TWO_PI
    if phi >= TWO_PI:
        phi = 0.0
    return phi


def state_vector(q: PureQubit) -> np.ndarray:
    """(cos theta, e^{i phi} sin theta)"""
    return np.array([math.cos(q.theta), complex(math.cos(q.phi), math.sin(q.phi)) * math.sin(q.theta)])


def bloch_vector(q: PureQubit) -> BlochVector:
    s = math.sin(2.0 * q.theta)
    return BlochVector.from_array([s * math.cos(q.phi), s * math.sin(q.phi), math.cos(2.0 * q.theta)])


def from_bloch_vector(v: AxisLike) -> PureQubit:
    """Inverse of bloch_vector (phi = 0 wherever the azimuth is undefined)"""
    x, y, z = _as_unit(v, "Bloch vector", tolerance=1e-6)
    theta = 0.5 * math.atan2(math.hypot(x, y), z)
    phi = 0.0 if math.hypot(x, y) < 1e-14 else math.atan2(y, x)
    return from_angles(theta, phi)


def _as_unit(v: AxisLike, name: str, tolerance: float) -> np.ndarray:
    arr = v.as_array() if isinstance(v, BlochVector) else np.asarray(v, dtype=float)
    if arr.shape != (3,) or not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} needs three finite components")
    norm = float(np.linalg.norm(arr))
    if abs(norm - 1.0) > tolerance:
        raise DomainError(f"{name} must be unit-norm within {tolerance} (norm {norm!r})")
    return arr / norm


def bloch_angle(q1: PureQubit, q2: PureQubit) -> float:
    """Great-circle angle between the two Bloch vectors"""
    a = bloch_vector(q1).as_array()
    b = bloch_vector(q2).as_array()
    # atan2 form stays accurate for nearly parallel vectors
    return float(math.atan2(np.linalg.norm(np.cross(a, b)), float(np.dot(a, b))))


def bloch_angle_to_hilbert(delta) -> float:
    """Phase-minimized Hilbert distance of two states a Bloch angle delta apart"""
    delta = require_range("delta", delta, 0.0, math.pi)
    return 2.0 * math.sin(delta / 4.0)


def hilbert_to_bloch_angle(h) -> float:
    h = require_range("hilbert distance", h, 0.0, math.sqrt(2.0) + 1e-12)
    return 4.0 * math.asin(min(h / 2.0, math.sqrt(0.5)))


# --- distinguishability ---

def fidelity(q1: PureQubit, q2: PureQubit) -> float:
    """|<psi1|psi2>|^2"""
    overlap = (
        math.cos(q1.theta) * math.cos(q2.theta)
        + complex(math.cos(q2.phi - q1.phi), math.sin(q2.phi - q1.phi)) * math.sin(q1.theta) * math.sin(q2.theta)
    )
    return min(1.0, max(0.0, abs(overlap) ** 2))


def hilbert_distance(q1: PureQubit, q2: PureQubit) -> float:
    """
    min over global phase of |psi1 - e^{i chi} psi2| = sqrt(2 - 2 sqrt(F)),
    evaluated as 2 sin(delta/4) so nearly equal states do not cancel
    """
    return 2.0 * math.sin(0.25 * bloch_angle(q1, q2))


def trace_distance(q1: PureQubit, q2: PureQubit) -> float:
    """sqrt(1 - F) = sin(delta/2)"""
    return math.sin(0.5 * bloch_angle(q1, q2))


def helstrom_success(q1: PureQubit, q2: PureQubit) -> float:
    """Optimal single-shot discrimination probability with equal priors"""
    return 0.5 * (1.0 + trace_distance(q1, q2))


def indistinguishability_ceiling(epsilon) -> float:
    """Largest Helstrom success for states closer than epsilon in Hilbert norm"""
    epsilon = require_range("epsilon", epsilon, 0.0, math.sqrt(2.0))
    return 0.5 * (1.0 + epsilon * math.sqrt(max(0.0, 1.0 - epsilon * epsilon / 4.0)))


def brute_force_distinguish(q1: PureQubit, q2: PureQubit, mesh: int) -> float:
    """
    Best success probability over two-outcome projective measurements whose axis
    lies on a mesh of Bloch directions.

    Probabilities are computed from explicit projectors |n+><n+| acting on the
    state vectors, independently of the trace-distance formula.
    """
    mesh = require_int("mesh", mesh, minimum=8)

    polar = math.pi * np.arange(mesh + 1) / mesh
    azimuth = TWO_PI * np.arange(mesh) / mesh
    pp, aa = np.meshgrid(polar, azimuth, indexing="ij")
    # eigenvector of n.sigma with eigenvalue +1
    up = np.stack([np.cos(pp / 2.0), np.exp(1j * aa) * np.sin(pp / 2.0)], axis=-1)

    psi1 = state_vector(q1)
    psi2 = state_vector(q2)
    p_plus_1 = np.abs(up.conj() @ psi1) ** 2
    p_plus_2 = np.abs(up.conj() @ psi2) ** 2

    # guess q1 on "+", q2 on "-" (or the reverse labelling)
    success = 0.5 * p_plus_1 + 0.5 * (1.0 - p_plus_2)
    success = np.maximum(success, 1.0 - success)
    return float(np.max(success))


# --- grids ---

def grid_size(epsilon) -> int:
    """Point count build_grid starts from at resolution epsilon (poles included)"""
    epsilon = require_range("epsilon", epsilon, 0.0, math.pi, low_inclusive=False)
    return max(4, math.ceil(GRID_DENSITY / epsilon ** 2)) + 2


def fibonacci_points(count: int) -> np.ndarray:
    """Fibonacci-sphere points with z = 1 - (2i + 1)/count"""
    i = np.arange(count)
    z = 1.0 - (2.0 * i + 1.0) / count
    rho = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    azimuth = i * _GOLDEN_ANGLE
    return np.stack([rho * np.cos(azimuth), rho * np.sin(azimuth), z], axis=1)


def covering_radius(points: np.ndarray) -> float:
    """
    Largest Bloch angle from any sphere point to its nearest grid point.

    The hull facets of points on the sphere are its spherical Delaunay
    triangles; the circumcentre of each facet is the outward normal, and the
    farthest sphere point from the grid is one of those circumcentres.
    """
    hull = ConvexHull(points)
    # facet plane n.x + d = 0, so n.vertex = -d
    cos_radius = np.clip(-hull.equations[:, 3], -1.0, 1.0)
    return float(np.max(np.arccos(cos_radius)))


@cached
def build_grid(epsilon) -> SphereGrid:
    """Quasi-uniform grid whose covering radius is at most epsilon"""
    epsilon = require_range("epsilon", epsilon, 0.0, math.pi, low_inclusive=False)

    count = grid_size(epsilon) - 2
    poles = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]])
    while True:
        points = np.vstack([poles, fibonacci_points(count)])
        mesh = covering_radius(points)
        if mesh <= epsilon:
            break
        logger.debug("grid of %d points misses epsilon=%g (mesh %g); growing", count + 2, epsilon, mesh)
        count = math.ceil(count * GRID_GROWTH)

    logger.debug("Built sphere grid: epsilon=%g points=%d mesh=%g", epsilon, count + 2, mesh)
    return SphereGrid(epsilon=epsilon, points=points, mesh_diameter=mesh)


def _nearest_index(grid: SphereGrid, v: np.ndarray) -> int:
    k = min(4, grid.size)
    dist, idx = grid.tree.query(v, k=k)
    dist = np.atleast_1d(dist)
    idx = np.atleast_1d(idx)
    # lowest index among exact ties
    return int(np.min(idx[dist == dist[0]]))


def snap(grid: SphereGrid, q: PureQubit) -> PureQubit:
    """Grid point nearest to q on the Bloch sphere"""
    v = bloch_vector(q).as_array()
    return from_bloch_vector(grid.points[_nearest_index(grid, v)])


def is_grid_point(grid: SphereGrid, q: PureQubit, tolerance: float = 1e-12) -> bool:
    v = bloch_vector(q).as_array()
    return float(np.linalg.norm(grid.points[_nearest_index(grid, v)] - v)) <= tolerance


# --- rotations ---

def rotate(q: PureQubit, axis: AxisLike, angle) -> PureQubit:
    """Rigid rotation of the Bloch vector about axis by angle (Rodrigues formula)"""
    k = _as_unit(axis, "rotation axis", tolerance=AXIS_NORM_TOLERANCE)
    angle = require_finite("angle", angle)

    v = bloch_vector(q).as_array()
    c, s = math.cos(angle), math.sin(angle)
    rotated = v * c + np.cross(k, v) * s + k * float(np.dot(k, v)) * (1.0 - c)
    return from_bloch_vector(rotated / np.linalg.norm(rotated))


def snapped_rotate(grid: SphereGrid, q: PureQubit, axis: AxisLike, angle) -> PureQubit:
    """Rotation as realized on the grid: the exact rotation, snapped"""
    return snap(grid, rotate(q, axis, angle))


def resolvable_rotation(
    grid: SphereGrid,
    q: PureQubit,
    axis: AxisLike,
    max_angle: float = math.pi,
    tolerance: float = 1e-9,
) -> Optional[float]:
    """
    Smallest angle about axis at which the snapped rotation leaves q.

    Scans in steps of a quarter of the grid resolution, then bisects the first
    step where the snapped state changes. Returns None if q stays put up to
    max_angle (e.g. q lies on the axis).
    """
    max_angle = require_range("max_angle", max_angle, 0.0, TWO_PI, low_inclusive=False)
    start = snap(grid, q)
    step = grid.epsilon / 4.0

    def moved(angle):
        return bloch_angle(snapped_rotate(grid, start, axis, angle), start) > 1e-12

    low, high = 0.0, None
    for i in range(1, math.ceil(max_angle / step) + 1):
        angle = min(i * step, max_angle)
        if moved(angle):
            high = angle
            break
        low = angle

    if high is None:
        return None

    while high - low > tolerance:
        mid = 0.5 * (low + high)
        if moved(mid):
            high = mid
        else:
            low = mid
    return high
