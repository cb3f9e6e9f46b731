"""
Quantum mechanics on a finite periodic lattice and on a discrete circle.

Momentum is spectral: the unitary DFT diagonalizes it, with the momentum grid
2*pi*j/L in FFT order and the single Nyquist mode at -N/2. Free evolution is
therefore a phase per Fourier mode and exactly unitary.
"""
import logging
import math
from typing import Sequence, Tuple

import numpy as np
from scipy.linalg import dft
from scipy.stats import linregress

from schemas.lattice import (
    ClassicalCircle,
    Lattice,
    LatticeState,
    OperatorMatrix,
    SpreadReport,
    Topology,
)
from utils.cache import cached
from utils.validation import DomainError, require_finite, require_int, require_positive, require_range

logger = logging.getLogger(__name__)

# circular variance above which a position spread is flagged as wrapped
WRAP_VARIANCE = 0.5
# the angle operator needs the packet well clear of its branch cut
CIRCLE_VARIANCE_LIMIT = 0.1
MIN_SIGMA_SITES = 4.0
MAX_SIGMA_FRACTION = 1.0 / 8.0


def make_lattice(n_sites, length, topology=Topology.LINE_PERIODIC) -> Lattice:
    """Periodic lattice of n_sites (even, >= 4) spanning length"""
    n_sites = require_int("n_sites", n_sites, minimum=4, even=True)
    length = require_positive("length", length)
    try:
        topology = Topology(topology)
    except ValueError:
        raise DomainError(f"topology must be one of: {', '.join(t.value for t in Topology)} (got {topology!r})")
    return Lattice(n_sites=n_sites, length=length, spacing=length / n_sites, topology=topology)


def _nearest_image(lat: Lattice, d: np.ndarray) -> np.ndarray:
    """Displacements reduced to [-L/2, L/2)"""
    half = 0.5 * lat.length
    return np.mod(d + half, lat.length) - half


def _check_dimension(lat: Lattice, psi: LatticeState):
    if psi.dimension != lat.n_sites:
        raise DomainError(f"state has {psi.dimension} amplitudes, lattice has {lat.n_sites} sites")


def sigma_window(lat: Lattice) -> Tuple[float, float]:
    """Widths a Gaussian packet can take without being under-resolved or wrapping"""
    return MIN_SIGMA_SITES * lat.spacing, MAX_SIGMA_FRACTION * lat.length


def gaussian_packet(lat: Lattice, x0, p0, sigma) -> LatticeState:
    """
    Normalized Gaussian exp(-(x - x0)^2 / (4 sigma^2) + i p0 x), with x - x0
    measured on the periodic nearest image. The phase uses the same unwrapped
    coordinate x0 + d so the packet has no seam at its antipode.
    """
    x0 = require_finite("x0", x0)
    p0 = require_finite("p0", p0)
    low, high = sigma_window(lat)
    sigma = require_finite("sigma", sigma)
    if not low <= sigma <= high:
        raise DomainError(f"sigma must lie in [4*spacing, length/8] = [{low:.6g}, {high:.6g}] (got {sigma})")

    d = _nearest_image(lat, lat.coordinates() - x0)
    amplitudes = np.exp(-d * d / (4.0 * sigma * sigma) + 1j * p0 * (x0 + d))
    return LatticeState.normalized(amplitudes)


def momentum_amplitudes(psi: LatticeState) -> np.ndarray:
    """Unitary DFT of the amplitudes, FFT order"""
    return np.fft.fft(psi.amplitudes, norm="ortho")


def _propagate(amplitudes: np.ndarray, phases: np.ndarray, t: float) -> np.ndarray:
    if t == 0.0:
        return amplitudes
    return np.fft.ifft(np.exp(-1j * t * phases) * np.fft.fft(amplitudes, norm="ortho"), norm="ortho")


def evolve_free(lat: Lattice, psi: LatticeState, m, t) -> LatticeState:
    """Apply exp(-i t p^2 / 2m), diagonal in the Fourier basis"""
    _check_dimension(lat, psi)
    m = require_positive("m", m)
    t = require_finite("t", t)
    if t == 0.0:
        return psi
    k = lat.momenta()
    return LatticeState(amplitudes=_propagate(psi.amplitudes, k * k / (2.0 * m), t))


def kinetic_energy(lat: Lattice, psi: LatticeState, m) -> float:
    """<p^2 / 2m> from the Fourier power spectrum"""
    _check_dimension(lat, psi)
    m = require_positive("m", m)
    power = np.abs(momentum_amplitudes(psi)) ** 2
    k = lat.momenta()
    return float(np.sum(power * k * k) / (2.0 * m))


def _circular_stats(angles: np.ndarray, density: np.ndarray) -> Tuple[float, float]:
    """(circular mean angle, circular variance) of a density on the circle"""
    resultant = complex(np.sum(density * np.exp(1j * angles)))
    variance = min(1.0, max(0.0, 1.0 - abs(resultant)))
    return math.atan2(resultant.imag, resultant.real), variance


def _circular_mean_x(lat: Lattice, density: np.ndarray) -> Tuple[float, float]:
    mean_angle, variance = _circular_stats(lat.angles(), density)
    return lat.length * mean_angle / (2.0 * math.pi), variance


def spreads(lat: Lattice, psi: LatticeState) -> SpreadReport:
    """
    Position spread about the circular mean (nearest-image distances) and the
    momentum spread of the Fourier power spectrum.
    """
    _check_dimension(lat, psi)
    density = np.abs(psi.amplitudes) ** 2
    density = density / density.sum()

    mean_x, variance = _circular_mean_x(lat, density)
    d = _nearest_image(lat, lat.coordinates() - mean_x)
    delta_x = math.sqrt(float(np.sum(density * d * d)))

    power = np.abs(momentum_amplitudes(psi)) ** 2
    power = power / power.sum()
    k = lat.momenta()
    mean_k = float(np.sum(power * k))
    delta_p = math.sqrt(max(0.0, float(np.sum(power * (k - mean_k) ** 2))))

    wrapped = variance > WRAP_VARIANCE
    if wrapped:
        logger.warning("⚠️ State spread is comparable to the lattice length (circular variance %.3f); "
                       "delta_x is unreliable", variance)
    return SpreadReport(
        delta_x=delta_x,
        delta_p=delta_p,
        circular_variance=variance,
        wrapped=wrapped,
        mean_x=mean_x,
    )


def uncertainty_product(lat: Lattice, psi: LatticeState, strict: bool = False) -> float:
    """delta_x * delta_p; with strict=True a wrapped state is an error"""
    report = spreads(lat, psi)
    if strict and report.wrapped:
        raise DomainError(
            f"circular variance {report.circular_variance:.3f} > {WRAP_VARIANCE}: position spread undefined"
        )
    return report.product


# --- operators ---

@cached
def build_xp(lat: Lattice) -> Tuple[OperatorMatrix, OperatorMatrix]:
    """Position (diagonal) and spectral momentum F^dagger diag(k) F as dense matrices"""
    f = dft(lat.n_sites, scale="sqrtn")
    k = lat.momenta()
    x = OperatorMatrix(entries=np.diag(lat.coordinates()).astype(complex), label="X")
    p = OperatorMatrix(entries=f.conj().T @ (k[:, None] * f), label="P")
    logger.debug("Built X, P for N=%d (P hermiticity error %.2e)", lat.n_sites, p.hermiticity_error())
    return x, p


def centered_position(lat: Lattice, psi: LatticeState) -> OperatorMatrix:
    """
    Diagonal X with its wrap seam opposite the packet's circular mean. A packet
    with sigma <= L/16 then sits at least 8 sigma from the seam wherever it is
    centred.
    """
    _check_dimension(lat, psi)
    density = np.abs(psi.amplitudes) ** 2
    mean_x, _ = _circular_mean_x(lat, density / density.sum())
    x = mean_x + _nearest_image(lat, lat.coordinates() - mean_x)
    return OperatorMatrix(entries=np.diag(x).astype(complex), label="X")


def _check_pair(a: OperatorMatrix, b: OperatorMatrix):
    if a.dimension != b.dimension:
        raise DomainError(f"operator dimensions differ ({a.dimension} != {b.dimension})")


def commutator_trace(a: OperatorMatrix, b: OperatorMatrix) -> complex:
    """trace(AB - BA), zero in every finite dimension"""
    _check_pair(a, b)
    ab = np.sum(a.entries * b.entries.T)
    ba = np.sum(b.entries * a.entries.T)
    return complex(ab - ba)


def canonical_commutator_trace(n) -> complex:
    """trace(i * I_n): what [x, p] = i would require"""
    n = require_int("n", n, minimum=1)
    return complex(0.0, n)


def commutator_expectation(a: OperatorMatrix, b: OperatorMatrix, psi: LatticeState) -> complex:
    """<psi|(AB - BA)|psi>"""
    _check_pair(a, b)
    if psi.dimension != a.dimension:
        raise DomainError(f"state has {psi.dimension} amplitudes, operators act on {a.dimension}")
    v = psi.amplitudes
    return complex(np.vdot(v, a.entries @ (b.entries @ v)) - np.vdot(v, b.entries @ (a.entries @ v)))


# --- circle ---

def angular_momenta(n_sites: int) -> np.ndarray:
    """Integer angular momenta in FFT order, Nyquist at -N/2"""
    return np.fft.ifftshift(np.arange(-(n_sites // 2), n_sites // 2)).astype(float)


def _angle_operator(lat: Lattice, psi: LatticeState) -> np.ndarray:
    """Diagonal of Phi(0): site angles with the branch cut opposite the packet"""
    if lat.topology is not Topology.CIRCLE:
        raise DomainError(f"circle topology required (got {lat.topology.value})")
    _check_dimension(lat, psi)

    density = np.abs(psi.amplitudes) ** 2
    angles = lat.angles()
    mean, variance = _circular_stats(angles, density / density.sum())
    if variance >= CIRCLE_VARIANCE_LIMIT:
        raise DomainError(
            f"packet too delocalized for the angle operator: circular variance < {CIRCLE_VARIANCE_LIMIT} "
            f"required (got {variance:.4f})"
        )
    return mean + np.mod(angles - mean + math.pi, 2.0 * math.pi) - math.pi


def _rotor_phases(circ: ClassicalCircle, lat: Lattice) -> np.ndarray:
    ell = angular_momenta(lat.n_sites)
    return circ.hamiltonian(ell)


def circle_commutator_check(circ: ClassicalCircle, lat: Lattice, t, psi: LatticeState) -> complex:
    """
    <psi|[Phi(0), Phi(t)]|psi> with Phi(t) = U^dagger Phi(0) U and
    U = exp(-i t l^2 / (2 m r^2)). Compare with i t / (m r^2).
    """
    t = require_finite("t", t)
    phi = _angle_operator(lat, psi)
    h = _rotor_phases(circ, lat)

    # <Phi0 psi| U^dagger Phi0 U |psi> and its conjugate
    evolved = _propagate(psi.amplitudes, h, t)
    evolved_phi = _propagate(phi * psi.amplitudes, h, t)
    forward = complex(np.vdot(evolved_phi, phi * evolved))
    return forward - forward.conjugate()


def expected_angle_drift(circ: ClassicalCircle, lat: Lattice, psi: LatticeState, t) -> float:
    """<Phi(t)> - <Phi(0)>, the quantum counterpart of phi(t) = omega t + phi(0)"""
    t = require_finite("t", t)
    phi = _angle_operator(lat, psi)
    evolved = _propagate(psi.amplitudes, _rotor_phases(circ, lat), t)
    before = float(np.sum(phi * np.abs(psi.amplitudes) ** 2))
    after = float(np.sum(phi * np.abs(evolved) ** 2))
    return after - before


def commutator_linearity(
    circ: ClassicalCircle,
    lat: Lattice,
    psi: LatticeState,
    times: Sequence[float],
) -> Tuple[float, float]:
    """Linear fit of Im<[Phi(0), Phi(t)]> against t: (slope, r_squared)"""
    times = [require_range("t", t, 0.0) for t in times]
    if len(set(times)) < 3:
        raise DomainError("at least three distinct times required for the linearity fit")
    values = [circle_commutator_check(circ, lat, t, psi).imag for t in times]
    fit = linregress(times, values)
    return float(fit.slope), float(fit.rvalue ** 2)


# --- state populations ---

def random_smooth_state(lat: Lattice, rng: np.random.Generator) -> LatticeState:
    """
    Chirped Gaussian with random centre, width in [8 spacing, L/16], momentum and
    chirp; half the time superposed with a second packet within L/8 of the first.
    """
    width_low, width_high = 8.0 * lat.spacing, lat.length / 16.0
    if width_low > width_high:
        raise DomainError(f"lattice too coarse for smooth states: need n_sites >= 128 (got {lat.n_sites})")
    k_max = math.pi / lat.spacing
    x = lat.coordinates()

    def packet(x0):
        sigma = rng.uniform(width_low, width_high)
        p0 = rng.uniform(-0.25, 0.25) * k_max
        chirp = rng.uniform(-0.5, 0.5) / sigma ** 2
        d = _nearest_image(lat, x - x0)
        return np.exp(-d * d / (4.0 * sigma * sigma) + 1j * (p0 * (x0 + d) + chirp * d * d))

    x0 = rng.uniform(x[0], x[0] + lat.length)
    amplitudes = packet(x0)
    if rng.random() < 0.5:
        offset = rng.uniform(-0.125, 0.125) * lat.length
        weight = rng.uniform(0.2, 1.0) * np.exp(1j * rng.uniform(0.0, 2.0 * math.pi))
        amplitudes = amplitudes + weight * packet(x0 + offset)
    return LatticeState.normalized(amplitudes)


def quantize_amplitudes(psi: LatticeState, resolution) -> LatticeState:
    """Round real and imaginary parts to multiples of resolution, then renormalize"""
    resolution = require_range("resolution", resolution, 0.0)
    if resolution == 0.0:
        return psi
    v = psi.amplitudes
    rounded = resolution * (np.round(v.real / resolution) + 1j * np.round(v.imag / resolution))
    if not np.any(rounded):
        raise DomainError(f"resolution {resolution} rounds every amplitude to zero")
    return LatticeState.normalized(rounded)
