"""Random-phase-perturbation beamforming baseline.

All transmitters jitter their phases simultaneously each interval; a single
broadcast bit says whether the measured power beat the best recorded value,
in which case every transmitter keeps its candidate phase. This is the
classic derivative-free ascent this package's sequential protocol is
compared against.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from .angles import wrap_angle
from .channel import Scenario
from .power import EXACT, MeasurementModel, PhaseAssignment, harvested_power, measure

DIST_UNIFORM = "uniform-symmetric"
DIST_GAUSSIAN = "gaussian"

#: Default perturbation half-range, radians.
DEFAULT_SCALE = math.pi / 8.0


@dataclass(frozen=True)
class PerturbationConfig:
    """Perturbation law and run length for the baseline."""

    distribution: str = DIST_UNIFORM
    scale: float = DEFAULT_SCALE   # half-range (uniform) or std (gaussian)
    max_intervals: int = 300

    def __post_init__(self):
        if self.distribution not in (DIST_UNIFORM, DIST_GAUSSIAN):
            raise ValueError(f"unknown distribution {self.distribution!r}")
        if not self.scale > 0.0:
            raise ValueError("scale must be positive")
        if self.max_intervals < 1:
            raise ValueError("max_intervals must be >= 1")


@dataclass
class BaselineTrace:
    """Per-interval history of one baseline run."""

    candidate_phases: np.ndarray   # (intervals, M)
    measured_power: np.ndarray     # power actually received each interval
    best_power: np.ndarray         # record after each interval; non-decreasing
    accepted: np.ndarray           # bool, candidate kept
    final_phases: np.ndarray
    final_power: float

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("n,power,best_power,accepted\n")
        for n in range(len(self.measured_power)):
            out.write(
                f"{n + 1},{self.measured_power[n]:.15g},"
                f"{self.best_power[n]:.15g},{int(self.accepted[n])}\n"
            )
        return out.getvalue()


def run_random_perturbation(
    s: Scenario,
    cfg: PerturbationConfig,
    meas: MeasurementModel = EXACT,
    rng: np.random.Generator | None = None,
) -> BaselineTrace:
    """Run the simultaneous-perturbation baseline from all-zero phases.

    Each interval every transmitter adds an independent draw to its current
    best phase; the receiver measures the resulting power, compares it with
    the recorded best and broadcasts one bit. Candidates are kept only on a
    strict improvement, so under exact measurement the best-power sequence
    is non-decreasing.
    """
    if rng is None:
        rng = np.random.default_rng()
    m = s.num_transmitters
    best = np.zeros(m)
    best_power = measure(meas, harvested_power(s, PhaseAssignment(best.copy())))
    t = cfg.max_intervals
    cand_hist = np.zeros((t, m))
    meas_hist = np.zeros(t)
    best_hist = np.zeros(t)
    acc_hist = np.zeros(t, dtype=bool)
    for n in range(t):
        if cfg.distribution == DIST_UNIFORM:
            step = rng.uniform(-cfg.scale, cfg.scale, size=m)
        else:
            step = rng.normal(0.0, cfg.scale, size=m)
        cand = wrap_angle(best + step)
        p = measure(meas, harvested_power(s, PhaseAssignment(cand.copy())))
        if p > best_power:
            best = cand
            best_power = p
            acc_hist[n] = True
        cand_hist[n] = cand
        meas_hist[n] = p
        best_hist[n] = best_power
    return BaselineTrace(
        candidate_phases=cand_hist,
        measured_power=meas_hist,
        best_power=best_hist,
        accepted=acc_hist,
        final_phases=best,
        final_power=best_power,
    )
