import math

import numpy as np
import pytest

from distbeam import (
    Channel,
    MeasurementModel,
    PhaseAssignment,
    Scenario,
    aligned_phase,
    harvested_power,
    measure,
    optimal_power,
    partial_power,
    sum_signal,
    wrap_angle,
)
from distbeam.power import MODE_ADDITIVE_NOISE

from conftest import equal_gain_scenario, grid_argmax, phasor_power, random_scenario, time_domain_power


def test_single_transmitter():
    s = equal_gain_scenario(1)
    for phi in (-2.0, 0.0, 1.3):
        assert harvested_power(s, PhaseAssignment([phi])) == pytest.approx(1.0)


def test_two_coherent_transmitters():
    s = Scenario(1.0, 1.0, 1.0, [Channel(1.0, 0.4), Channel(1.0, -1.1)])
    pa = PhaseAssignment(s.phase_shifts.copy())
    assert harvested_power(s, pa) == pytest.approx(4.0, rel=1e-14)


def test_two_opposed_transmitters():
    s = Scenario(1.0, 1.0, 1.0, [Channel(1.0, 0.0), Channel(1.0, 0.0)])
    pa = PhaseAssignment([0.0, -math.pi])
    assert harvested_power(s, pa) == pytest.approx(0.0, abs=1e-12)


def test_no_active_transmitters():
    s = equal_gain_scenario(3)
    pa = PhaseAssignment(np.zeros(3), np.zeros(3, dtype=bool))
    assert harvested_power(s, pa) == 0.0


def test_mask_length_mismatch():
    s = equal_gain_scenario(3)
    with pytest.raises(ValueError):
        harvested_power(s, PhaseAssignment(np.zeros(2)))
    with pytest.raises(ValueError):
        PhaseAssignment(np.zeros(3), np.ones(2, dtype=bool))


def test_random_instance_matches_phasor_oracle(rng):
    s = random_scenario(rng, 4)
    pa = PhaseAssignment(rng.uniform(-math.pi, math.pi, 4))
    assert harvested_power(s, pa) == pytest.approx(phasor_power(s, pa), rel=1e-12)


def test_phasor_oracle_randomized(rng):
    for _ in range(400):
        m = int(rng.integers(1, 33))
        s = random_scenario(rng, m)
        active = rng.random(m) < 0.8
        pa = PhaseAssignment(rng.uniform(-math.pi, math.pi, m), active)
        a = harvested_power(s, pa)
        b = phasor_power(s, pa)
        assert a == pytest.approx(b, rel=1e-10, abs=1e-25)


def test_time_domain_oracle(rng):
    for _ in range(50):
        m = int(rng.integers(1, 6))
        s = random_scenario(rng, m)
        pa = PhaseAssignment(rng.uniform(-math.pi, math.pi, m))
        assert harvested_power(s, pa) == pytest.approx(
            time_domain_power(s, pa), rel=1e-9, abs=1e-22
        )


def test_rho_and_power_scaling(rng):
    base = random_scenario(rng, 3)
    pa = PhaseAssignment(rng.uniform(-math.pi, math.pi, 3))
    scaled = Scenario(2.5, base.carrier_freq, 0.4, base.channels)
    assert harvested_power(scaled, pa) == pytest.approx(
        harvested_power(base, pa) * 2.5 * 0.4, rel=1e-12
    )


def test_optimal_power_values():
    assert optimal_power(equal_gain_scenario(2)) == pytest.approx(4.0)
    assert optimal_power(equal_gain_scenario(5)) == pytest.approx(25.0)


def test_optimal_equals_aligned_harvest(rng):
    for _ in range(100):
        s = random_scenario(rng, int(rng.integers(1, 12)))
        pa = PhaseAssignment(s.phase_shifts.copy())
        assert optimal_power(s) == harvested_power(s, pa)


def test_harvest_bounded_by_optimal(rng):
    for _ in range(500):
        m = int(rng.integers(1, 16))
        s = random_scenario(rng, m)
        pa = PhaseAssignment(rng.uniform(-math.pi, math.pi, m))
        q = harvested_power(s, pa)
        q_star = optimal_power(s)
        assert -1e-12 * q_star <= q <= q_star * (1 + 1e-12)


def test_global_phase_offset_invariance(rng):
    for _ in range(100):
        m = int(rng.integers(2, 10))
        s = random_scenario(rng, m)
        phases = rng.uniform(-math.pi, math.pi, m)
        c = rng.uniform(-10, 10)
        a = harvested_power(s, PhaseAssignment(phases))
        b = harvested_power(s, PhaseAssignment(phases + c))
        assert b == pytest.approx(a, rel=1e-10, abs=1e-25)


def test_sum_signal_single_other():
    s = Scenario(1.0, 1.0, 1.0, [Channel(0.7, 1.1), Channel(1.0, 0.0)])
    pa = PhaseAssignment([0.0, 0.0], [True, False])
    ss = sum_signal(s, pa, exclude=1)
    assert ss.gain == pytest.approx(0.7, rel=1e-14)
    # one transmitter at phase 0 behaves as a virtual channel with its own shift
    assert ss.phase_shift == pytest.approx(1.1, rel=1e-12)


def test_sum_signal_cancellation():
    # equal gains whose received phases are pi apart
    s = Scenario(1.0, 1.0, 1.0,
                 [Channel(1.0, 0.0), Channel(1.0, -math.pi), Channel(1.0, 0.5)])
    pa = PhaseAssignment([0.0, 0.0, 0.0], [True, True, False])
    ss = sum_signal(s, pa, exclude=2)
    assert ss.gain == pytest.approx(0.0, abs=1e-25)


def test_sum_signal_exact_zero_convention():
    # zero-gain transmitters sum to an exactly-zero phasor: phase 0
    s = Scenario(1.0, 1.0, 1.0, [Channel(0.0, 1.0), Channel(1.0, 0.5)])
    ss = sum_signal(s, PhaseAssignment([0.3, 0.0], [True, False]))
    assert ss.gain == 0.0 and ss.phase_shift == 0.0


def test_sum_signal_empty():
    s = equal_gain_scenario(2)
    pa = PhaseAssignment(np.zeros(2), np.zeros(2, dtype=bool))
    ss = sum_signal(s, pa)
    assert ss.gain == 0.0 and ss.phase_shift == 0.0


def test_sum_signal_matches_complex_oracle(rng):
    for _ in range(300):
        s = random_scenario(rng, 3)
        phases = rng.uniform(-math.pi, math.pi, 3)
        pa = PhaseAssignment(phases, [True, True, True])
        ss = sum_signal(s, pa, exclude=2)
        z = sum(
            math.sqrt(s.gains[i]) * np.exp(1j * (s.phase_shifts[i] - phases[i]))
            for i in range(2)
        )
        assert ss.gain == pytest.approx(abs(z) ** 2, rel=1e-12, abs=1e-30)
        if abs(z) > 1e-10:
            assert abs(wrap_angle(ss.phase_shift - np.angle(z))) < 1e-9


def test_partial_power_peak_value(rng):
    for _ in range(50):
        s = random_scenario(rng, 4)
        pa = PhaseAssignment(rng.uniform(-math.pi, math.pi, 4),
                             [True, True, True, False])
        ss = sum_signal(s, pa, exclude=3)
        peak = partial_power(s, ss, 3, aligned_phase(s, ss, 3))
        expected = (math.sqrt(s.gains[3]) + math.sqrt(ss.gain)) ** 2
        assert peak == pytest.approx(expected, rel=1e-12)


def test_partial_power_flat_when_alone():
    s = equal_gain_scenario(2, gain=0.3)
    ss = sum_signal(s, PhaseAssignment(np.zeros(2), np.zeros(2, dtype=bool)))
    values = {partial_power(s, ss, 1, phi) for phi in np.linspace(-3, 3, 7)}
    assert all(v == pytest.approx(0.3, rel=1e-14) for v in values)


def test_partial_power_grid_argmax(rng):
    for _ in range(30):
        s = random_scenario(rng, 5)
        pa = PhaseAssignment(rng.uniform(-math.pi, math.pi, 5),
                             [True, True, True, True, False])
        ss = sum_signal(s, pa, exclude=4)
        best = grid_argmax(lambda phi: partial_power(s, ss, 4, phi), points=360)
        target = aligned_phase(s, ss, 4)
        step = 2 * math.pi / 360
        assert abs(wrap_angle(best - target)) <= step


def test_partial_power_equals_harvested(rng):
    for _ in range(1000):
        m_total = int(rng.integers(2, 12))
        s = random_scenario(rng, m_total)
        phases = rng.uniform(-math.pi, math.pi, m_total)
        m = int(rng.integers(0, m_total))
        active = rng.random(m_total) < 0.7
        active[m] = False
        if not active.any():
            active[(m + 1) % m_total] = True
        ss = sum_signal(s, PhaseAssignment(phases.copy(), active.copy()), exclude=m)
        a = partial_power(s, ss, m, phases[m])
        joined = active.copy()
        joined[m] = True
        b = harvested_power(s, PhaseAssignment(phases.copy(), joined))
        assert a == pytest.approx(b, rel=1e-10, abs=1e-25)


def test_measure_exact_and_degenerate_noise():
    assert measure(MeasurementModel(), 3.7) == 3.7
    noiseless = MeasurementModel(MODE_ADDITIVE_NOISE, 0.0)
    assert measure(noiseless, 3.7) == 3.7


def test_measure_noise_reproducible():
    a = MeasurementModel(MODE_ADDITIVE_NOISE, 0.5, np.random.default_rng(5))
    b = MeasurementModel(MODE_ADDITIVE_NOISE, 0.5, np.random.default_rng(5))
    draws_a = [measure(a, 2.0) for _ in range(20)]
    draws_b = [measure(b, 2.0) for _ in range(20)]
    assert draws_a == draws_b
    assert any(d != 2.0 for d in draws_a)


def test_measure_noise_clamps_at_zero():
    m = MeasurementModel(MODE_ADDITIVE_NOISE, 100.0, np.random.default_rng(0))
    draws = [measure(m, 0.01) for _ in range(50)]
    assert min(draws) == 0.0


def test_measurement_model_validation():
    with pytest.raises(ValueError):
        MeasurementModel("bogus")
    with pytest.raises(ValueError):
        MeasurementModel(MODE_ADDITIVE_NOISE, -1.0)
    with pytest.raises(ValueError):
        MeasurementModel(MODE_ADDITIVE_NOISE, 1.0, None)
