"""Harvested-power computation for arbitrary phase assignments.

All powers come from the closed-form period average of the summed carrier:
a sum over per-link gains plus pairwise interference terms. Time-domain
integration is deliberately absent here; the test suite carries an
independent integrator used only as an oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .angles import wrap_angle
from .channel import Scenario


@dataclass
class PhaseAssignment:
    """Transmit phases plus an activity mask (idle transmitters send nothing)."""

    phases: np.ndarray
    active: np.ndarray | None = None

    def __post_init__(self):
        self.phases = wrap_angle(np.asarray(self.phases, dtype=float))
        if self.active is None:
            self.active = np.ones(self.phases.shape, dtype=bool)
        else:
            self.active = np.asarray(self.active, dtype=bool)
        if self.active.shape != self.phases.shape:
            raise ValueError("phases and active mask must have equal length")


@dataclass(frozen=True)
class SumSignal:
    """The combined signal of a set of active transmitters, reduced to an
    equivalent single channel.

    ``gain`` is the power of the combined carrier (in the same normalized
    units as a channel gain); ``phase_shift`` is the effective channel-style
    phase shift, i.e. the combined carrier arrives with phase -phase_shift.
    A transmitter aligning to this signal should transmit at its own channel
    phase shift minus ``phase_shift``.
    """

    gain: float
    phase_shift: float


#: Power-measurement behaviour at the receiver.
MODE_EXACT = "exact"
MODE_ADDITIVE_NOISE = "additive-noise"


@dataclass
class MeasurementModel:
    """Exact or additive-Gaussian-noise power measurement (noise clamps at 0)."""

    mode: str = MODE_EXACT
    noise_std: float = 0.0
    rng: np.random.Generator | None = None

    def __post_init__(self):
        if self.mode not in (MODE_EXACT, MODE_ADDITIVE_NOISE):
            raise ValueError(f"unknown measurement mode {self.mode!r}")
        if self.noise_std < 0.0:
            raise ValueError("noise_std must be >= 0")
        if self.mode == MODE_ADDITIVE_NOISE and self.noise_std > 0.0 and self.rng is None:
            raise ValueError("additive-noise mode with noise_std > 0 needs an rng")


EXACT = MeasurementModel(MODE_EXACT)


def measure(model: MeasurementModel, true_power: float) -> float:
    """Apply the measurement model to a true power value."""
    if model.mode == MODE_EXACT or model.noise_std == 0.0:
        return true_power
    return max(0.0, true_power + model.rng.normal(0.0, model.noise_std))


def _check_assignment(s: Scenario, pa: PhaseAssignment):
    if len(pa.phases) != s.num_transmitters:
        raise ValueError(
            f"assignment length {len(pa.phases)} != scenario size {s.num_transmitters}"
        )


def harvested_power(s: Scenario, pa: PhaseAssignment) -> float:
    """Average harvested power for a phase assignment, in watts.

    Sum of active gains plus, for every ordered pair of distinct active
    transmitters, sqrt(g_i g_j) cos((phi_i - th_i) - (phi_j - th_j)),
    all scaled by conversion efficiency times per-transmitter power.
    """
    _check_assignment(s, pa)
    idx = np.flatnonzero(pa.active)
    if idx.size == 0:
        return 0.0
    g = s.gains[idx]
    offs = pa.phases[idx] - s.phase_shifts[idx]
    amp = np.sqrt(g)
    # full ordered double sum; the diagonal contributes sum(g) since cos(0)=1
    pair = np.outer(amp, amp) * np.cos(offs[:, None] - offs[None, :])
    return s.conversion_eff * s.transmit_power * float(pair.sum())


def optimal_power(s: Scenario) -> float:
    """Maximum harvested power, attained when every transmit phase equals
    its channel phase shift."""
    pa = PhaseAssignment(phases=s.phase_shifts.copy())
    return harvested_power(s, pa)


def sum_signal(
    s: Scenario, pa: PhaseAssignment, exclude: int | None = None
) -> SumSignal:
    """Reduce the active transmitters (optionally minus one) to a SumSignal.

    The combined carrier of transmitters i is sum_i sqrt(g_i) at phase
    (phi_i - th_i); its power is the squared phasor magnitude and the
    reported phase shift is the angle of the conjugate phasor sum, so that
    the pair behaves like a single channel driven at phase zero. An empty
    set reduces to (0, 0).
    """
    _check_assignment(s, pa)
    re = 0.0
    im = 0.0
    for i in np.flatnonzero(pa.active):
        if i == exclude:
            continue
        amp = math.sqrt(s.gains[i])
        delta = s.phase_shifts[i] - pa.phases[i]
        re += amp * math.cos(delta)
        im += amp * math.sin(delta)
    gain = re * re + im * im
    if gain == 0.0:
        return SumSignal(0.0, 0.0)
    return SumSignal(gain, math.atan2(im, re))


def aligned_phase(s: Scenario, ss: SumSignal, m: int) -> float:
    """Transmit phase for transmitter m that maximizes partial_power."""
    return wrap_angle(s.channels[m].phase_shift - ss.phase_shift)


def partial_power(s: Scenario, ss: SumSignal, m: int, phi_m: float) -> float:
    """Harvested power when transmitter m at phase phi_m joins a fixed
    combined signal.

    Equals ``harvested_power`` over the corresponding active set; maximal at
    phi_m = phase_shift_m - ss.phase_shift.
    """
    g_m = s.gains[m]
    target = s.phase_shifts[m] - ss.phase_shift
    q = g_m + ss.gain + 2.0 * math.sqrt(g_m * ss.gain) * math.cos(phi_m - target)
    return s.conversion_eff * s.transmit_power * q
