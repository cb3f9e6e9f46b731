"""
Composite-state uncertainty: per-qubit perturbations of size epsilon, the
|Psi - Psi'|^2 ~ n epsilon^2 accumulation law, its Monte Carlo check and the
capacity bound n < epsilon^-2 ~ r^2.

A qubit state is a unit vector in C^2 (a point on S^3). Its tangent space splits
into the two horizontal directions, which move the Bloch vector, and the phase
direction i*psi. Phase-free perturbations stay horizontal; random-phase ones
spread the same Hilbert-norm budget over all three directions.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Sequence, Tuple

import numpy as np

from schemas.holography import McResult, PerturbationMode, PerturbationModel, PhaseConvention
from schemas.states import PureQubit
from services.bloch import from_bloch_vector, state_vector
from utils.validation import DomainError, require_int, require_positive, require_range, require_same_length

logger = logging.getLogger(__name__)

MIN_TRIALS = 100
MAX_MATERIALIZED_QUBITS = 12
# n * epsilon^2 ceiling of the small-accumulation regime
SMALL_REGIME = 0.1
# qubits generated per block inside one trial
QUBIT_BLOCK = 1 << 17
CAPACITY_SLACK = 1e-12


# --- vector kernels ---

def _vectors_from_angles(theta: np.ndarray, phi: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """State vectors and their complex-orthogonal partners, shape (n, 2)"""
    c, s = np.cos(theta), np.sin(theta)
    e = np.exp(1j * phi)
    psi = np.stack([c + 0j, e * s], axis=-1)
    perp = np.stack([-np.conj(e) * s, c + 0j], axis=-1)
    return psi, perp


def _perturbed_vectors(psi: np.ndarray, perp: np.ndarray, model: PerturbationModel,
                       rng: np.random.Generator) -> np.ndarray:
    """Move each row of psi a chord distance epsilon (in expectation for gaussian-magnitude) on S^3"""
    n = psi.shape[0]
    dims = 2 if model.phase_convention is PhaseConvention.PHASE_FREE else 3
    g = rng.standard_normal((n, dims))
    norm = np.linalg.norm(g, axis=1)
    norm = np.where(norm == 0.0, 1.0, norm)
    direction = g / norm[:, None]

    if model.mode is PerturbationMode.FIXED_MAGNITUDE:
        chord = np.full(n, model.epsilon)
    else:
        # E[chord^2] = epsilon^2
        chord = model.epsilon * norm / math.sqrt(dims)
    gamma = 2.0 * np.arcsin(np.minimum(chord / 2.0, 1.0))

    tangent = (direction[:, 0] + 1j * direction[:, 1])[:, None] * perp
    if dims == 3:
        tangent = tangent + (1j * direction[:, 2])[:, None] * psi
    return np.cos(gamma)[:, None] * psi + np.sin(gamma)[:, None] * tangent


def _ray(vector: np.ndarray) -> PureQubit:
    a, b = vector
    cross = np.conj(a) * b
    bloch = np.array([2.0 * cross.real, 2.0 * cross.imag, abs(a) ** 2 - abs(b) ** 2])
    return from_bloch_vector(bloch / np.linalg.norm(bloch))


def perturb(q: PureQubit, model: PerturbationModel, rng: np.random.Generator) -> PureQubit:
    """
    Independent perturbation of one qubit.

    In fixed-magnitude phase-free mode the result sits at hilbert_distance epsilon
    from q, in a direction uniform on the tangent circle. Random-phase mode moves
    part of the budget into the global phase, which a PureQubit does not carry.
    """
    psi, perp = _vectors_from_angles(np.array([q.theta]), np.array([q.phi]))
    return _ray(_perturbed_vectors(psi, perp, model, rng)[0])


# --- composite distances ---

def _distance_from_sums(log_magnitude: float, phase: float) -> float:
    """2 (1 - Re e^{S + i Phi}) without cancellation for S near 0"""
    if log_magnitude == -math.inf:
        return 2.0
    scale = math.exp(log_magnitude)
    value = 2.0 * (-math.expm1(log_magnitude) + 2.0 * scale * math.sin(0.5 * phase) ** 2)
    return min(4.0, max(0.0, value))


def _overlap_sums(overlaps: np.ndarray) -> Tuple[float, float]:
    magnitude = np.abs(overlaps)
    with np.errstate(divide="ignore"):
        log_magnitude = np.log1p(magnitude - 1.0)
    return float(np.sum(log_magnitude)), float(np.sum(np.angle(overlaps)))


def composite_distance_sq_from_overlaps(overlaps) -> float:
    """|Psi - Psi'|^2 = 2 (1 - Re prod_i <psi_i|psi'_i>), product taken in log space"""
    overlaps = np.asarray(overlaps, dtype=complex).reshape(-1)
    if overlaps.size == 0:
        raise DomainError("at least one overlap required")
    return _distance_from_sums(*_overlap_sums(overlaps))


def composite_distance_sq(qs: Sequence[PureQubit], qs_prime: Sequence[PureQubit]) -> float:
    """Squared norm distance of the two tensor products, global phase not minimized"""
    require_same_length("qs", qs, "qs'", qs_prime)
    if not qs:
        raise DomainError("n >= 1 qubits required")
    overlaps = [np.vdot(state_vector(a), state_vector(b)) for a, b in zip(qs, qs_prime)]
    return composite_distance_sq_from_overlaps(overlaps)


def materialized_distance_sq(qs: Sequence[PureQubit], qs_prime: Sequence[PureQubit]) -> float:
    """Brute force: build both 2^n vectors explicitly"""
    require_same_length("qs", qs, "qs'", qs_prime)
    n = len(qs)
    if not 1 <= n <= MAX_MATERIALIZED_QUBITS:
        raise DomainError(f"1 <= n <= {MAX_MATERIALIZED_QUBITS} required for materialization (got {n})")
    big, big_prime = np.ones(1, dtype=complex), np.ones(1, dtype=complex)
    for a, b in zip(qs, qs_prime):
        big = np.kron(big, state_vector(a))
        big_prime = np.kron(big_prime, state_vector(b))
    diff = big - big_prime
    return float(np.vdot(diff, diff).real)


# --- Monte Carlo ---

def _trial(n: int, model: PerturbationModel, seed: int, index: int) -> float:
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))
    log_magnitude, phase = 0.0, 0.0
    for start in range(0, n, QUBIT_BLOCK):
        size = min(QUBIT_BLOCK, n - start)
        # uniform on the Bloch sphere: z uniform, so theta = arccos(z) / 2
        theta = 0.5 * np.arccos(rng.uniform(-1.0, 1.0, size))
        phi = rng.uniform(0.0, 2.0 * math.pi, size)
        psi, perp = _vectors_from_angles(theta, phi)
        psi_prime = _perturbed_vectors(psi, perp, model, rng)

        overlaps = np.sum(np.conj(psi) * psi_prime, axis=1)
        if model.phase_convention is PhaseConvention.PHASE_FREE:
            overlaps = np.abs(overlaps)
        block_log, block_phase = _overlap_sums(overlaps)
        log_magnitude += block_log
        phase += block_phase
    return _distance_from_sums(log_magnitude, phase)


def mc_expected_distance(
    n,
    model: PerturbationModel,
    trials,
    seed,
    workers: int = 1,
) -> McResult:
    """
    Monte Carlo mean of |Psi - Psi'|^2 over uniform base states.

    Trial i draws from SeedSequence(seed, spawn_key=(i,)) and results are kept by
    index, so the estimate is the same for any number of workers.
    """
    n = require_int("n", n, minimum=1)
    trials = require_int("trials", trials, minimum=MIN_TRIALS)
    seed = require_int("seed", seed, minimum=0)
    if seed >= 2 ** 64:
        raise DomainError(f"seed < 2^64 required (got {seed})")
    workers = require_int("workers", workers, minimum=1)

    values = np.empty(trials)

    def run_chunk(indices: range):
        for i in indices:
            values[i] = _trial(n, model, seed, i)
        logger.debug("mc n=%d trials %d..%d done", n, indices.start, indices.stop - 1)

    chunk = max(1, math.ceil(trials / (4 * workers)))
    chunks = [range(i, min(i + chunk, trials)) for i in range(0, trials, chunk)]
    if workers == 1:
        for c in chunks:
            run_chunk(c)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run_chunk, chunks))

    mean = float(np.mean(values))
    std_error = float(np.std(values, ddof=1) / math.sqrt(trials))
    logger.info("mc n=%d epsilon=%g trials=%d -> %.6g +/- %.2g", n, model.epsilon, trials, mean, std_error)
    return McResult(
        n_qubits=n,
        epsilon=model.epsilon,
        trials=trials,
        mean_dist_sq=min(4.0, max(0.0, mean)),
        std_error=std_error,
        seed=seed,
    )


def expected_distance_sq(n, epsilon) -> float:
    """Closed form 2 (1 - (1 - epsilon^2/2)^n) for phase-aligned fixed-magnitude perturbations"""
    n = require_int("n", n, minimum=1)
    epsilon = require_range("epsilon", epsilon, 0.0, 1.0, low_inclusive=False, high_inclusive=False)
    return -2.0 * math.expm1(n * math.log1p(-0.5 * epsilon * epsilon))


def slope_fit(results: Sequence[McResult]) -> float:
    """Least-squares slope of mean_dist_sq against n through the origin"""
    results = list(results)
    if len(results) < 4:
        raise DomainError(f"at least 4 results required (got {len(results)})")
    epsilons = {r.epsilon for r in results}
    if len(epsilons) != 1:
        raise DomainError(f"results must share one epsilon (got {sorted(epsilons)})")
    ns = np.array([r.n_qubits for r in results], dtype=float)
    if ns.max() < 10.0 * ns.min():
        raise DomainError("n values must span at least a decade")
    epsilon = epsilons.pop()
    if ns.max() * epsilon ** 2 > SMALL_REGIME:
        raise DomainError(f"n * epsilon^2 <= {SMALL_REGIME} required for every result "
                          f"(max is {ns.max() * epsilon ** 2:.4g})")
    y = np.array([r.mean_dist_sq for r in results])
    return float(np.dot(ns, y) / np.dot(ns, ns))


# --- capacity ---

def holographic_capacity(r, coupling: float = 1.0, threshold: float = 1.0) -> int:
    """
    Largest n whose accumulated uncertainty n * epsilon^2 stays within threshold,
    with per-qubit epsilon = coupling / r. Defaults give floor(r^2).
    """
    r = require_range("r", r, 1.0)
    coupling = require_positive("coupling", coupling)
    threshold = require_positive("threshold", threshold)
    n_max = math.floor(threshold * r * r / (coupling * coupling) * (1.0 + CAPACITY_SLACK))
    if n_max < 1:
        raise DomainError(f"threshold * r^2 / coupling^2 >= 1 required (got {threshold * r * r / coupling ** 2:.4g})")
    return n_max


def required_epsilon(n, threshold: float = 1.0) -> float:
    """Per-qubit epsilon at which n qubits exhaust the threshold"""
    n = require_int("n", n, minimum=1)
    threshold = require_positive("threshold", threshold)
    return math.sqrt(threshold / n)


def saturation_curve(ns: Sequence[int], model: PerturbationModel, trials: int, seed: int,
                     workers: int = 1) -> List[McResult]:
    """mc_expected_distance over ns, sorted by n"""
    return [mc_expected_distance(n, model, trials, seed, workers) for n in sorted(set(ns))]
