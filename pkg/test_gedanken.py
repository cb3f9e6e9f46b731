"""
Tests for the rotating-device constraints and the minimal angle
"""
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from schemas.device import DeviceConfig
from services import gedanken
from utils.validation import DomainError

positive = st.floats(min_value=1e-3, max_value=1e6, allow_nan=False, allow_infinity=False)


def _device(m, r, t):
    return DeviceConfig(mass_m=m, size_r=r, duration_t=t)


@pytest.mark.parametrize("m, r, t, expected", [
    (1.0, 1.0, 1.0, 1 / math.sqrt(2)),
    (4.0, 1.0, 2.0, 0.5),
    (1e6, 1e6, 1e6, 1 / (math.sqrt(2) * 1e6)),
])
def test_uncertainty_floor_examples(m, r, t, expected):
    assert gedanken.uncertainty_floor(_device(m, r, t)) == pytest.approx(expected, rel=1e-12)


def test_commutator_and_product_bound():
    cfg = _device(100.0, 1.0, 1.0)
    assert gedanken.angular_commutator(cfg) == pytest.approx(0.01)
    assert gedanken.uncertainty_product_bound(cfg) == pytest.approx(0.005)


def test_uncertainty_floor_batch_matches_scalar():
    m = np.array([1.0, 4.0, 1e6])
    r = np.array([1.0, 1.0, 1e6])
    t = np.array([1.0, 2.0, 1e6])
    expected = [gedanken.uncertainty_floor(_device(*args)) for args in zip(m, r, t)]
    np.testing.assert_allclose(gedanken.uncertainty_floor_batch(m, r, t), expected, rtol=1e-14)
    with pytest.raises(DomainError):
        gedanken.uncertainty_floor_batch(m, -r, t)


def test_check_feasible_examples():
    assert gedanken.check_feasible(_device(1, 2, 3)).feasible
    report = gedanken.check_feasible(_device(2, 1, 3))
    assert not report.hoop_ok and not report.feasible
    report = gedanken.check_feasible(_device(1, 3, 2))
    assert report.hoop_ok and not report.causal_ok


def test_check_feasible_boundaries():
    """Hoop is strict, causality is not"""
    assert not gedanken.check_feasible(_device(1, 1, 1)).hoop_ok
    assert gedanken.check_feasible(_device(0.5, 1, 1)).causal_ok


def test_check_feasible_coefficients():
    cfg = _device(1.0, 1.5, 1.0)
    assert not gedanken.check_feasible(cfg, causality_coefficient=1.0).causal_ok
    assert gedanken.check_feasible(cfg, causality_coefficient=2.0).causal_ok
    assert not gedanken.check_feasible(cfg, hoop_coefficient=2.0).hoop_ok


def test_min_angle_examples():
    bound = gedanken.min_angle(1.0)
    assert bound.delta_phi == pytest.approx(0.70711, abs=1e-5)
    assert (bound.argmin_m, bound.argmin_t) == (1.0, 1.0)
    assert gedanken.min_angle(10.0).delta_phi == pytest.approx(0.070711, abs=1e-6)
    with pytest.raises(DomainError):
        gedanken.min_angle(0.0)


def test_min_angle_of_a_metre():
    r = gedanken.from_si(1.0, "length")
    assert gedanken.min_angle(r).delta_phi == pytest.approx(1.14e-35, rel=0.01)
    assert gedanken.min_angle_si(1.0) == pytest.approx(gedanken.min_angle(r).delta_phi)


def test_min_angle_with_coefficients():
    bound = gedanken.min_angle(2.0, hoop_coefficient=4.0, causality_coefficient=1.0)
    assert bound.delta_phi == pytest.approx(2.0 / (math.sqrt(2) * 2.0))
    assert bound.argmin_m == pytest.approx(0.5)


@given(st.floats(min_value=1e-3, max_value=1e3), st.floats(min_value=1e-3, max_value=1e3))
def test_min_angle_scaling(r, k):
    assert gedanken.min_angle(k * r).delta_phi == pytest.approx(gedanken.min_angle(r).delta_phi / k, rel=1e-12)


@pytest.mark.parametrize("r", [1.0, 10.0, 100.0])
def test_min_angle_scan_agrees_and_converges(r):
    analytic = gedanken.min_angle(r).delta_phi
    scan = gedanken.min_angle_scan(r, 256, 256, 10, 10)
    refined = gedanken.min_angle_scan(r, 512, 512, 10, 10)
    assert analytic <= scan.delta_phi <= 1.01 * analytic
    assert scan.argmin_m < r
    assert scan.argmin_t == r
    assert refined.delta_phi - analytic <= 0.5 * (scan.delta_phi - analytic)


def test_min_angle_scan_examples():
    scan = gedanken.min_angle_scan(1.0, 256, 256, 1, 10)
    assert scan.delta_phi == pytest.approx(0.70711, rel=0.01)
    assert scan.argmin_m == pytest.approx(1.0, rel=0.02)
    assert scan.argmin_t == 1.0

    assert gedanken.min_angle_scan(10.0, 256, 256, 1, 10).delta_phi == pytest.approx(0.070711, rel=0.01)

    restricted = gedanken.min_angle_scan(1.0, 256, 256, 0.5, 10)
    assert restricted.delta_phi == pytest.approx(1.0, rel=1e-12)


def test_min_angle_scan_preconditions():
    with pytest.raises(DomainError):
        gedanken.min_angle_scan(1.0, 8, 256, 10, 10)
    with pytest.raises(DomainError):
        gedanken.min_angle_scan(1.0, 256, 256, 10, 0.5)
    with pytest.raises(DomainError):
        gedanken.min_angle_scan(-1.0, 256, 256, 10, 10)


def test_min_angle_scan_without_feasible_points():
    """A hoop coefficient large enough pushes every grid mass into collapse"""
    with pytest.raises(DomainError):
        gedanken.min_angle_scan(1.0, 16, 16, 1, 10, hoop_coefficient=100.0)


@pytest.mark.parametrize("r", [1.0, 10.0, 100.0])
def test_bound_holds_on_random_feasible_devices(r):
    rng = np.random.default_rng(int(r))
    m = r * rng.uniform(1e-6, 1.0, 100_000)
    t = r * rng.uniform(1.0, 1e3, 100_000)
    feasible = (r > m) & (r <= t)
    floors = gedanken.uncertainty_floor_batch(m[feasible], r, t[feasible])
    assert np.min(floors) >= gedanken.min_angle(r).delta_phi - 1e-12


@given(positive, positive, positive)
def test_floor_is_bounded_below_when_feasible(m, r, t):
    cfg = _device(m, r, t)
    if gedanken.check_feasible(cfg).feasible:
        assert gedanken.uncertainty_floor(cfg) >= gedanken.min_angle(r).delta_phi - 1e-12


@given(
    st.floats(min_value=1e-150, max_value=1e150),
    st.floats(min_value=1e-3, max_value=1.0, exclude_max=True),
    st.floats(min_value=1.0, max_value=1e3),
)
def test_floor_stays_in_range_for_extreme_sizes(r, mass_fraction, time_factor):
    cfg = _device(mass_fraction * r, r, time_factor * r)
    floor = gedanken.uncertainty_floor(cfg)
    bound = gedanken.min_angle(r).delta_phi
    assert 0.0 < floor < math.inf
    assert floor >= bound * (1.0 - 1e-12)
    assert gedanken.uncertainty_product_bound(cfg) == pytest.approx(floor ** 2, rel=1e-12)


@pytest.mark.parametrize("r", [1e-120, 1e110])
def test_min_angle_scan_at_extreme_sizes(r):
    analytic = gedanken.min_angle(r).delta_phi
    scan = gedanken.min_angle_scan(r, 64, 64, 10, 10)
    assert math.isfinite(scan.delta_phi)
    assert analytic <= scan.delta_phi * (1.0 + 1e-12)
    assert scan.delta_phi <= 1.1 * analytic


def test_to_si_examples():
    assert gedanken.to_si(1.0, "length") == pytest.approx(1.6e-35, rel=0.02)
    assert gedanken.to_si(1.0, "time") == pytest.approx(5.39e-44, rel=1e-3)
    assert gedanken.to_si(1.0, "mass") == pytest.approx(2.176e-8, rel=1e-3)
    assert gedanken.to_si(0.5, "angle") == 0.5
    with pytest.raises(DomainError):
        gedanken.to_si(1.0, "charge")


@given(st.floats(min_value=-1e40, max_value=1e40, allow_nan=False), st.sampled_from(list(gedanken.QuantityKind)))
def test_si_round_trip(value, kind):
    assert gedanken.from_si(gedanken.to_si(value, kind), kind) == pytest.approx(value, rel=1e-12, abs=1e-300)


@pytest.mark.parametrize("omega, t, phi0, expected", [
    (0.0, 5.0, 1.0, 1.0),
    (math.pi, 2.0, 0.0, 0.0),
    (0.1, 3.0, 0.2, 0.5),
])
def test_classical_angle(omega, t, phi0, expected):
    assert gedanken.classical_angle(omega, t, phi0) == pytest.approx(expected, abs=1e-12)


def test_rotation_realizable():
    assert gedanken.rotation_realizable(10.0, 0.1)
    assert not gedanken.rotation_realizable(10.0, 0.05)
    assert gedanken.rotation_realizable(1e35, -2e-35)
