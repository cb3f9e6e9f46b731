"""
Rotating-device thought experiment: the angular uncertainty floor, the collapse and
causality constraints on the device, and the minimal resolvable angle.

Natural units throughout (hbar = c = G_N = 1): masses in Planck masses, lengths in
Planck lengths, times in Planck times. to_si / from_si convert at the edges.
"""
import logging
import math
from enum import Enum

import numpy as np

from schemas.device import AngleBound, DeviceConfig, FeasibilityReport
from utils import constants
from utils.validation import DomainError, require_finite, require_int, require_positive

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)
# decades the mass scan reaches below min(m_max, r)
MASS_SCAN_DECADES = 1.0


class QuantityKind(str, Enum):
    """Physical dimension of a Planck-unit value"""
    LENGTH = "length"
    TIME = "time"
    MASS = "mass"
    ANGLE = "angle"


def uncertainty_product_bound(cfg: DeviceConfig) -> float:
    """Right-hand side of |dphi(0)| |dphi(t)| >= t / (2 m r^2)"""
    return cfg.duration_t / cfg.mass_m / (2.0 * cfg.size_r) / cfg.size_r


def angular_commutator(cfg: DeviceConfig) -> float:
    """Imaginary coefficient of [phi(0), phi(t)] = i t / (m r^2)"""
    return cfg.duration_t / cfg.mass_m / cfg.size_r / cfg.size_r


def _floor(m, r, t):
    # m r^2 is never formed: it leaves float range for extreme r
    return np.sqrt(t / 2.0) / np.sqrt(m) / r


def uncertainty_floor(cfg: DeviceConfig) -> float:
    """Floor on max(dphi(0), dphi(t)): two measurements, so the larger is at least the root"""
    return float(_floor(cfg.mass_m, cfg.size_r, cfg.duration_t))


def uncertainty_floor_batch(m, r, t) -> np.ndarray:
    """Vectorized uncertainty_floor over broadcastable arrays"""
    m, r, t = (np.asarray(a, dtype=float) for a in (m, r, t))
    if np.any(~np.isfinite(m) | ~np.isfinite(r) | ~np.isfinite(t)) or np.any((m <= 0) | (r <= 0) | (t <= 0)):
        raise DomainError("m, r and t must be positive and finite")
    return _floor(m, r, t)


def check_feasible(
    cfg: DeviceConfig,
    hoop_coefficient: float = 1.0,
    causality_coefficient: float = 1.0,
) -> FeasibilityReport:
    """
    Hoop constraint r > k_h * m (strict: equality already collapses) and
    causality r <= k_c * t. Both coefficients default to exactly 1.
    """
    k_h = require_positive("hoop_coefficient", hoop_coefficient)
    k_c = require_positive("causality_coefficient", causality_coefficient)
    hoop_ok = cfg.size_r > k_h * cfg.mass_m
    causal_ok = cfg.size_r <= k_c * cfg.duration_t
    return FeasibilityReport(hoop_ok=hoop_ok, causal_ok=causal_ok, feasible=hoop_ok and causal_ok)


def min_angle(r, hoop_coefficient: float = 1.0, causality_coefficient: float = 1.0) -> AngleBound:
    """
    Infimum of uncertainty_floor over feasible devices of size r.

    The floor falls with m and rises with t, so it is smallest on the boundary
    m = r / k_h, t = r / k_c, giving sqrt(k_h / k_c) / (sqrt(2) r).
    """
    r = require_positive("r", r)
    k_h = require_positive("hoop_coefficient", hoop_coefficient)
    k_c = require_positive("causality_coefficient", causality_coefficient)
    delta_phi = 1.0 / (SQRT2 * r)
    if k_h != k_c:
        delta_phi *= math.sqrt(k_h / k_c)
    return AngleBound(delta_phi=delta_phi, argmin_m=r / k_h, argmin_t=r / k_c)


def scan_axes(r: float, m_grid: int, t_grid: int, m_max_factor: float, t_max_factor: float):
    """Log-spaced (m, t) axes of the brute-force scan, both ascending"""
    m_top = m_max_factor * r
    m_bottom = min(m_max_factor, 1.0) * r / 10.0 ** MASS_SCAN_DECADES
    masses = m_bottom * np.geomspace(1.0, m_top / m_bottom, m_grid)
    masses[-1] = m_top

    times = r * np.geomspace(1.0, t_max_factor, t_grid)
    # t = r is the causal boundary and must be hit exactly
    times[0] = r
    times[-1] = t_max_factor * r
    return masses, times


def min_angle_scan(
    r,
    m_grid: int,
    t_grid: int,
    m_max_factor: float,
    t_max_factor: float,
    hoop_coefficient: float = 1.0,
    causality_coefficient: float = 1.0,
) -> AngleBound:
    """
    Brute-force minimum of uncertainty_floor over a feasible (m, t) grid.

    Ties go to the smallest m, then the smallest t, so the answer does not depend
    on how the grid is evaluated.
    """
    r = require_positive("r", r)
    m_grid = require_int("m_grid", m_grid, minimum=16)
    t_grid = require_int("t_grid", t_grid, minimum=16)
    m_max_factor = require_positive("m_max_factor", m_max_factor)
    t_max_factor = require_positive("t_max_factor", t_max_factor)
    if t_max_factor < 1.0:
        raise DomainError(f"t_max_factor >= 1 required (got {t_max_factor})")
    k_h = require_positive("hoop_coefficient", hoop_coefficient)
    k_c = require_positive("causality_coefficient", causality_coefficient)

    masses, times = scan_axes(r, m_grid, t_grid, m_max_factor, t_max_factor)
    mm, tt = np.meshgrid(masses, times, indexing="ij")
    feasible = (r > k_h * mm) & (r <= k_c * tt)
    if not np.any(feasible):
        raise DomainError(
            f"no feasible device on the scan grid for r={r} "
            f"(m in [{masses[0]:.4g}, {masses[-1]:.4g}], t in [{times[0]:.4g}, {times[-1]:.4g}])"
        )

    floor = np.where(feasible, _floor(mm, r, tt), np.inf)
    best = float(np.min(floor))
    i, j = np.argwhere(floor == best)[0]
    logger.debug("min_angle_scan r=%g grid=%dx%d -> %g at m=%g t=%g", r, m_grid, t_grid, best, masses[i], times[j])
    return AngleBound(delta_phi=best, argmin_m=float(masses[i]), argmin_t=float(times[j]))


def classical_angle(omega, t, phi0) -> float:
    """phi(t) = omega t + phi(0), reduced mod 2 pi"""
    omega = require_finite("omega", omega)
    t = require_finite("t", t)
    phi0 = require_finite("phi0", phi0)
    angle = math.fmod(omega * t + phi0, 2.0 * math.pi)
    if angle < 0.0:
        angle += 2.0 * math.pi
    if angle >= 2.0 * math.pi:
        angle = 0.0
    return angle


def rotation_realizable(r, angle) -> bool:
    """A rotation is realizable only if it moves the device rim by at least one Planck length"""
    r = require_positive("r", r)
    angle = require_finite("angle", angle)
    return r * abs(angle) >= 1.0


def _planck_scale(kind) -> float:
    try:
        kind = QuantityKind(kind)
    except ValueError:
        raise DomainError(f"kind must be one of: {', '.join(k.value for k in QuantityKind)} (got {kind!r})")
    if kind is QuantityKind.ANGLE:
        return 1.0
    return constants.planck_units()[kind.value]


def to_si(value, kind) -> float:
    """Planck-unit value -> SI (m, s, kg); angles pass through"""
    value = require_finite("value", value)
    return value * _planck_scale(kind)


def from_si(value, kind) -> float:
    """SI value -> Planck units"""
    value = require_finite("value", value)
    return value / _planck_scale(kind)


def min_angle_si(size_m) -> float:
    """Minimal angle (radians) for a device whose size is given in metres"""
    size_m = require_positive("size_m", size_m)
    return min_angle(from_si(size_m, QuantityKind.LENGTH)).delta_phi
