"""
Experiment runner: one validated config in, one results table (plus a
provenance sidecar) out.

Every random draw is derived from the config seed through SeedSequence spawn
keys, so a rerun reproduces the results table byte for byte.
"""
import logging
import math
import os
import tempfile
import time
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from tenacity import RetryError, retry, retry_if_exception_type, stop_after_attempt, wait_exponential

from app_env_config import get_settings
from schemas.holography import PerturbationModel
from schemas.lattice import ClassicalCircle, Topology
from schemas.report import (
    BoundParameters,
    CircleParameters,
    DistinguishParameters,
    ExperimentConfig,
    ExperimentName,
    HolographyParameters,
    LatticeParameters,
    RunReport,
)
from services import bloch, gedanken, holography, lattice
from utils.response_format import create_run_report, format_report_metadata, format_results_table
from utils.validation import ReportWriteError

logger = logging.getLogger(__name__)

Table = Tuple[List[str], List[Dict[str, Any]], Dict[str, Any]]

RANDOM_DEVICES = 100_000
RESOLVABLE_SAMPLE = 32


def _rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


# --- bound ---

def _random_feasible_floor(r: float, k_h: float, k_c: float, rng: np.random.Generator) -> Tuple[float, int]:
    """Smallest uncertainty floor over random feasible devices of size r"""
    m = (r / k_h) * 10.0 ** (-3.0 * (1.0 - rng.random(RANDOM_DEVICES)))
    t = (r / k_c) * 10.0 ** (2.0 * rng.random(RANDOM_DEVICES))
    feasible = (r > k_h * m) & (r <= k_c * t)
    floors = gedanken.uncertainty_floor_batch(m[feasible], r, t[feasible])
    return float(np.min(floors)), int(np.count_nonzero(feasible))


def run_bound(p: BoundParameters, seed: int, workers: int) -> Table:
    columns = [
        "r", "analytic_delta_phi", "scan_delta_phi", "relative_gap", "refined_delta_phi", "refined_gap",
        "gap_ratio", "scan_argmin_m", "scan_argmin_t", "random_min_floor", "random_devices", "bound_respected",
    ]
    coefficients = dict(hoop_coefficient=p.hoop_coefficient, causality_coefficient=p.causality_coefficient)
    rows = []
    for index, r in enumerate(sorted(set(p.r))):
        analytic = gedanken.min_angle(r, **coefficients)
        scan = gedanken.min_angle_scan(r, p.m_grid, p.t_grid, p.m_max_factor, p.t_max_factor, **coefficients)
        refined = gedanken.min_angle_scan(
            r, 2 * p.m_grid, 2 * p.t_grid, p.m_max_factor, p.t_max_factor, **coefficients
        )
        gap = scan.delta_phi / analytic.delta_phi - 1.0
        refined_gap = refined.delta_phi / analytic.delta_phi - 1.0
        floor, count = _random_feasible_floor(r, p.hoop_coefficient, p.causality_coefficient, _rng(seed, index))
        rows.append({
            "r": r,
            "analytic_delta_phi": analytic.delta_phi,
            "scan_delta_phi": scan.delta_phi,
            "relative_gap": gap,
            "refined_delta_phi": refined.delta_phi,
            "refined_gap": refined_gap,
            "gap_ratio": refined_gap / gap if gap > 0 else 0.0,
            "scan_argmin_m": scan.argmin_m,
            "scan_argmin_t": scan.argmin_t,
            "random_min_floor": floor,
            "random_devices": count,
            "bound_respected": floor >= analytic.delta_phi * (1.0 - 1e-12),
        })

    summary = {
        "max_relative_gap": max(row["relative_gap"] for row in rows),
        "scan_within_1pct": all(row["relative_gap"] <= 0.01 for row in rows),
        "refinement_halves_gap": all(row["gap_ratio"] <= 0.5 for row in rows),
        "bound_respected": all(row["bound_respected"] for row in rows),
    }
    return columns, rows, summary


# --- distinguish ---

def _perpendicular_axis(v: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Uniform random unit axis orthogonal to v"""
    while True:
        g = rng.standard_normal(3)
        axis = g - np.dot(g, v) * v
        norm = np.linalg.norm(axis)
        if norm > 1e-6:
            return axis / norm


def run_distinguish(p: DistinguishParameters, seed: int, workers: int) -> Table:
    columns = [
        "bloch_angle", "hilbert_distance", "trace_distance", "helstrom_success", "brute_force_success",
        "abs_difference", "ceiling",
    ]
    reference = bloch.from_angles(0.0, 0.0)
    rows = []
    for i in range(p.n_angles):
        delta = math.pi * i / (p.n_angles - 1)
        other = bloch.from_angles(delta / 2.0, 0.0)
        helstrom = bloch.helstrom_success(reference, other)
        brute = bloch.brute_force_distinguish(reference, other, p.mesh)
        h = bloch.hilbert_distance(reference, other)
        rows.append({
            "bloch_angle": delta,
            "hilbert_distance": h,
            "trace_distance": bloch.trace_distance(reference, other),
            "helstrom_success": helstrom,
            "brute_force_success": brute,
            "abs_difference": abs(helstrom - brute),
            "ceiling": bloch.indistinguishability_ceiling(h),
        })

    grid = bloch.build_grid(p.grid_epsilon)
    rng = _rng(seed, 0)
    indices = rng.integers(0, grid.size, p.states)
    fixed = 0
    resolvable = []
    for k, idx in enumerate(indices):
        v = grid.points[idx]
        q = bloch.from_bloch_vector(v)
        axis = _perpendicular_axis(v, rng)
        if bloch.bloch_angle(bloch.snapped_rotate(grid, q, axis, p.displacement), bloch.snap(grid, q)) <= 1e-12:
            fixed += 1
        if k < RESOLVABLE_SAMPLE:
            angle = bloch.resolvable_rotation(grid, q, axis)
            if angle is not None:
                resolvable.append(angle)

    summary = {
        "max_abs_difference": max(row["abs_difference"] for row in rows),
        "grid_epsilon": grid.epsilon,
        "grid_points": grid.size,
        "grid_mesh_diameter": grid.mesh_diameter,
        "displacement": p.displacement,
        "snapped_fixed_fraction": fixed / p.states,
        "min_resolvable_rotation": min(resolvable) if resolvable else None,
        "mean_resolvable_rotation": float(np.mean(resolvable)) if resolvable else None,
    }
    return columns, rows, summary


# --- lattice ---

def run_lattice(p: LatticeParameters, seed: int, workers: int) -> Table:
    columns = [
        "sigma", "delta_x", "delta_p", "product", "expected_delta_x", "wrapped",
        "commutator_re", "commutator_im", "canonical_deviation", "energy_drift",
    ]
    lat = lattice.make_lattice(p.n_sites, p.length)
    _, p_op = lattice.build_xp(lat)

    rows = []
    for sigma in sorted(set(p.sigmas)):
        psi0 = lattice.gaussian_packet(lat, 0.0, 0.0, sigma)
        psi = lattice.evolve_free(lat, psi0, p.mass, p.evolve_time)
        psi = lattice.quantize_amplitudes(psi, p.amplitude_resolution)
        report = lattice.spreads(lat, psi)
        bracket = lattice.commutator_expectation(lattice.centered_position(lat, psi), p_op, psi)
        e0 = lattice.kinetic_energy(lat, psi0, p.mass)
        e1 = lattice.kinetic_energy(lat, psi, p.mass)
        rows.append({
            "sigma": sigma,
            "delta_x": report.delta_x,
            "delta_p": report.delta_p,
            "product": report.product,
            "expected_delta_x": math.sqrt(sigma ** 2 + p.evolve_time ** 2 / (4.0 * sigma ** 2 * p.mass ** 2)),
            "wrapped": report.wrapped,
            "commutator_re": bracket.real,
            "commutator_im": bracket.imag,
            "canonical_deviation": abs(bracket - 1j),
            "energy_drift": abs(e1 - e0) / e0 if e0 > 0 else 0.0,
        })

    rng = _rng(seed, 0)
    products = []
    for _ in range(p.random_states):
        state = lattice.quantize_amplitudes(lattice.random_smooth_state(lat, rng), p.amplitude_resolution)
        products.append(lattice.uncertainty_product(lat, state))

    traces = []
    for n in sorted(set(p.trace_sizes)):
        small = lattice.make_lattice(n, float(n))
        xs, ps = lattice.build_xp(small)
        trace = lattice.commutator_trace(xs, ps)
        traces.append({
            "n": n,
            "trace_re": trace.real,
            "trace_im": trace.imag,
            "canonical_trace_im": lattice.canonical_commutator_trace(n).imag,
            "p_hermiticity_error": ps.hermiticity_error(),
        })

    summary = {
        "random_states": p.random_states,
        "min_random_product": min(products),
        "uncertainty_persists": min(products) >= 0.49,
        "max_abs_trace": max(math.hypot(t["trace_re"], t["trace_im"]) for t in traces),
        "trace_checks": traces,
    }
    return columns, rows, summary


# --- circle ---

def run_circle(p: CircleParameters, seed: int, workers: int) -> Table:
    columns = [
        "t", "commutator_re", "commutator_im", "expected_im", "relative_error", "angle_drift",
        "expected_drift", "classical_angle",
    ]
    lat = lattice.make_lattice(p.n_sites, 2.0 * math.pi * p.radius, Topology.CIRCLE)
    circ = ClassicalCircle.from_momentum(p.mass, p.radius, p.p_phi)
    psi = lattice.gaussian_packet(lat, 0.0, p.p_phi / p.radius, p.radius * p.sigma)

    rows = []
    for t in sorted(set(p.times)):
        value = lattice.circle_commutator_check(circ, lat, t, psi)
        expected = t / circ.moment_of_inertia
        rows.append({
            "t": t,
            "commutator_re": value.real,
            "commutator_im": value.imag,
            "expected_im": expected,
            "relative_error": abs(value.imag - expected) / expected if expected > 0 else None,
            "angle_drift": lattice.expected_angle_drift(circ, lat, psi, t),
            "expected_drift": p.p_phi * t / circ.moment_of_inertia,
            "classical_angle": gedanken.classical_angle(circ.omega, t, 0.0),
        })

    slope, r_squared = lattice.commutator_linearity(circ, lat, psi, p.times)
    errors = [row["relative_error"] for row in rows if row["relative_error"] is not None]
    summary = {
        "slope": slope,
        "expected_slope": 1.0 / circ.moment_of_inertia,
        "slope_relative_error": abs(slope * circ.moment_of_inertia - 1.0),
        "r_squared": r_squared,
        "linear": r_squared > 0.999,
        "max_relative_error": max(errors) if errors else None,
    }
    return columns, rows, summary


# --- holography ---

def run_holography(p: HolographyParameters, seed: int, workers: int) -> Table:
    columns = [
        "n", "epsilon", "trials", "mean_dist_sq", "std_error", "seed", "regime", "n_eps_sq",
        "closed_form", "ratio_to_n_eps_sq",
    ]
    model = PerturbationModel(epsilon=p.epsilon, mode=p.mode, phase_convention=p.phase_convention)
    results = holography.saturation_curve(p.n_values, model, p.trials, seed, workers)
    runs = [(result, "small") for result in results]
    if p.saturation_n is not None:
        saturated = holography.mc_expected_distance(p.saturation_n, model, p.saturation_trials, seed, workers)
        runs.append((saturated, "saturation"))

    rows = []
    for result, regime in sorted(runs, key=lambda item: item[0].n_qubits):
        closed = holography.expected_distance_sq(result.n_qubits, result.epsilon)
        rows.append({
            "n": result.n_qubits,
            "epsilon": result.epsilon,
            "trials": result.trials,
            "mean_dist_sq": result.mean_dist_sq,
            "std_error": result.std_error,
            "seed": result.seed,
            "regime": regime,
            "n_eps_sq": result.accumulated,
            "closed_form": closed,
            "ratio_to_n_eps_sq": result.mean_dist_sq / result.accumulated,
        })

    slope = holography.slope_fit(results)
    summary: Dict[str, Any] = {
        "slope": slope,
        "slope_over_eps_sq": slope / p.epsilon ** 2,
        "slope_in_band": 0.95 <= slope / p.epsilon ** 2 <= 1.05,
        "within_3se_of_closed_form": all(
            abs(r.mean_dist_sq - holography.expected_distance_sq(r.n_qubits, r.epsilon)) <= 3.0 * r.std_error + 1e-9
            for r in results
        ),
    }
    if p.saturation_n is not None:
        summary["saturation_mean"] = saturated.mean_dist_sq
    if p.r is not None:
        capacity = holography.holographic_capacity(p.r, p.coupling, p.threshold)
        required = holography.required_epsilon(capacity, p.threshold)
        summary.update({
            "r": p.r,
            "capacity": capacity,
            "required_epsilon": required,
            "epsilon_from_r": p.coupling / p.r,
            "min_angle": gedanken.min_angle(p.r).delta_phi,
            "chain_consistent": required >= p.coupling / p.r,
        })
    return columns, rows, summary


RUNNERS: Dict[ExperimentName, Callable[[Any, int, int], Table]] = {
    ExperimentName.BOUND: run_bound,
    ExperimentName.DISTINGUISH: run_distinguish,
    ExperimentName.LATTICE: run_lattice,
    ExperimentName.CIRCLE: run_circle,
    ExperimentName.HOLOGRAPHY: run_holography,
}


# --- output ---

_io_retry = retry(
    stop=stop_after_attempt(3),
    wait=wait_exponential(multiplier=0.1, max=1),
    retry=retry_if_exception_type(OSError),
)


@_io_retry
def _stage_file(path: str, content: str) -> str:
    """Write content to a temp file beside path and return the temp path"""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(content)
    except OSError:
        os.unlink(tmp)
        raise
    return tmp


@_io_retry
def _commit_file(tmp: str, path: str):
    os.replace(tmp, path)


def write_files(contents: Dict[str, str]):
    """
    Replace several files together. Everything is staged before the first
    rename and renames follow the order of contents, so a failure leaves every
    target that comes after it untouched. Leftover temp files are removed.
    """
    staged: Dict[str, str] = {}
    current = None
    try:
        for current, content in contents.items():
            staged[current] = _stage_file(current, content)
        for current, tmp in staged.items():
            _commit_file(tmp, current)
    except RetryError as e:
        cause = e.last_attempt.exception()
        raise ReportWriteError(current, str(cause)) from cause
    finally:
        for tmp in staged.values():
            if os.path.exists(tmp):
                os.unlink(tmp)
    logger.debug("Wrote %s", ", ".join(contents))


def write_report(report: RunReport, config: ExperimentConfig) -> str:
    """Results table to output_path, provenance to <output_path>.meta.json"""
    path = config.output_path
    table = format_results_table(report.columns, report.rows, config.output_format)
    meta = format_report_metadata(report, path)
    # provenance first: a table is never replaced without its sidecar
    write_files({f"{path}.meta.json": meta, path: table})
    logger.info("📄 Report written to %s", path)
    return path


def run(config: ExperimentConfig, workers: Optional[int] = None, write: bool = True) -> RunReport:
    """Execute the configured experiment and (by default) write its report"""
    workers = workers or get_settings()["LAB_MAX_WORKERS"]
    logger.info("🔬 Running %s (seed=%d, workers=%d)", config.experiment.value, config.seed, workers)
    start = time.time()

    columns, rows, summary = RUNNERS[config.experiment](config.parameters, config.seed, workers)

    elapsed = time.time() - start
    report = create_run_report(config, columns, rows, summary, elapsed)
    logger.info("✅ %s finished in %.2fs (%d rows)", config.experiment.value, elapsed, len(rows))
    if write:
        write_report(report, config)
    return report
