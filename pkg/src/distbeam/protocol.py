"""Sequential distributed beamforming protocol and its closed-form bounds.

Transmitter 1 fixes an arbitrary reference phase; every later transmitter
in turn aligns to the combined signal of the already-fixed ones via the
one-bit bisection, then keeps transmitting. The delivered power, its
efficiency against the optimum, a worst-case lower bound on that
efficiency, and the feedback budget needed for a target efficiency all
have closed forms that this module implements and cross-checks.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from .angles import wrap_angle
from .adapt import TrainingTrace, adapt_phase
from .channel import Scenario
from .power import (
    EXACT,
    MeasurementModel,
    PhaseAssignment,
    harvested_power,
    optimal_power,
    sum_signal,
)


class InfeasibleEfficiencyTarget(ValueError):
    """The required-interval formula has no real solution for this target."""


@dataclass
class ProtocolResult:
    """Outcome of one full sequential run."""

    final_phases: np.ndarray
    q_d: float
    q_star: float
    eta: float
    traces: list[TrainingTrace]
    target_phases: np.ndarray        # per-stage optima recorded during the run
    errors: np.ndarray               # final phase minus stage optimum, wrapped
    total_feedback_intervals: int

    def summary_csv(self, bound: float | None = None) -> str:
        m = len(self.final_phases)
        n = (
            self.total_feedback_intervals // (m - 1)
            if m > 1
            else 0
        )
        if bound is None:
            bound = float("nan")
        max_err = float(np.max(np.abs(self.errors))) if m > 1 else 0.0
        out = io.StringIO()
        out.write("M,N,Q_d,Q_star,eta,bound,max_abs_error\n")
        out.write(
            f"{m},{n},{self.q_d:.15g},{self.q_star:.15g},"
            f"{self.eta:.15g},{bound:.15g},{max_err:.15g}\n"
        )
        return out.getvalue()


def run_protocol(
    s: Scenario,
    n_intervals: int,
    meas: MeasurementModel = EXACT,
    first_phase: float = 0.0,
) -> ProtocolResult:
    """Run the sequential protocol with ``n_intervals`` per transmitter.

    Consumes n_intervals * (M - 1) feedback intervals in total. The probe
    lattice of every stage is rotated by ``first_phase`` so that choosing a
    different reference phase reproduces the same run rotated rigidly.
    """
    m_total = s.num_transmitters
    if m_total < 2:
        raise ValueError("protocol needs at least two transmitters")
    if n_intervals < 1:
        raise ValueError("n_intervals must be >= 1")
    phases = np.zeros(m_total)
    phases[0] = wrap_angle(first_phase)
    active = np.zeros(m_total, dtype=bool)
    active[0] = True
    traces: list[TrainingTrace] = []
    targets = np.zeros(m_total)
    errors = np.zeros(m_total)
    for m in range(1, m_total):
        pa = PhaseAssignment(phases=phases.copy(), active=active.copy())
        phi_m, trace = adapt_phase(
            s, pa, m, n_intervals, meas, probe_offset=first_phase
        )
        phases[m] = phi_m
        active[m] = True
        traces.append(trace)
        targets[m] = trace.target_phase
        errors[m] = wrap_angle(phi_m - trace.target_phase)
    q_d = harvested_power(s, PhaseAssignment(phases=phases.copy()))
    q_star = optimal_power(s)
    return ProtocolResult(
        final_phases=phases,
        q_d=q_d,
        q_star=q_star,
        eta=q_d / q_star,
        traces=traces,
        target_phases=targets,
        errors=errors,
        total_feedback_intervals=n_intervals * (m_total - 1),
    )


def phase_errors(result: ProtocolResult, s: Scenario) -> np.ndarray:
    """Recompute per-stage phase errors from the final phases.

    Stage m's optimum depends only on the phases fixed before it, which the
    sequential protocol never revisits, so replaying the prefix sums
    reproduces the targets recorded during the run. The first transmitter
    has no target and its error is zero by convention.
    """
    m_total = s.num_transmitters
    errors = np.zeros(m_total)
    for m in range(1, m_total):
        active = np.zeros(m_total, dtype=bool)
        active[:m] = True
        ss = sum_signal(s, PhaseAssignment(result.final_phases.copy(), active))
        target = wrap_angle(s.channels[m].phase_shift - ss.phase_shift)
        errors[m] = wrap_angle(result.final_phases[m] - target)
    return errors


def efficiency_lower_bound(s: Scenario, n_intervals: int) -> float:
    """Worst-case delivered/optimal power ratio for a per-stage budget.

    Every pairwise interference term is discounted by the squared cosine of
    the worst-case per-stage phase error pi/2**n_intervals; the ratio is
    scale-free, so power and efficiency factors cancel.
    """
    if n_intervals < 1:
        raise ValueError("n_intervals must be >= 1")
    g = s.gains
    amp = np.sqrt(g)
    cross = float(np.sum(np.outer(amp, amp))) - float(np.sum(g))
    worst = math.cos(math.pi / 2.0 ** n_intervals) ** 2
    total = float(np.sum(g))
    return (total + cross * worst) / (total + cross)


def required_intervals(s: Scenario, eta_hat: float) -> float:
    """Per-stage feedback budget guaranteeing a target efficiency.

    Returns the (real-valued) bound on the number of per-transmitter
    intervals; callers round up to an integer. A target of exactly 1 needs
    an unbounded budget (+inf). Targets too low for the formula's arccos
    domain raise :class:`InfeasibleEfficiencyTarget`.
    """
    if not 0.0 < eta_hat <= 1.0:
        raise ValueError("eta_hat must lie in (0, 1]")
    g = s.gains
    amp = np.sqrt(g)
    cross = float(np.sum(np.outer(amp, amp))) - float(np.sum(g))
    if cross == 0.0:
        # single transmitter: any assignment is optimal
        return 0.0
    radicand = eta_hat - (1.0 - eta_hat) * float(np.sum(g)) / cross
    if radicand < 0.0 or radicand > 1.0:
        raise InfeasibleEfficiencyTarget(
            f"target efficiency {eta_hat} is outside the formula's domain "
            f"(radicand {radicand:.6g})"
        )
    angle = math.acos(math.sqrt(radicand))
    if angle == 0.0:
        return float("inf")
    return math.log2(math.pi / angle)


def required_intervals_equal_gains(m: int, eta_hat: float) -> float:
    """Specialization of :func:`required_intervals` for identical gains."""
    if m < 2:
        return 0.0
    if not 0.0 < eta_hat <= 1.0:
        raise ValueError("eta_hat must lie in (0, 1]")
    radicand = (m * eta_hat - 1.0) / (m - 1.0)
    if radicand < 0.0:
        raise InfeasibleEfficiencyTarget(
            f"target efficiency {eta_hat} is outside the formula's domain"
        )
    angle = math.acos(math.sqrt(radicand))
    if angle == 0.0:
        return float("inf")
    return math.log2(math.pi / angle)


def accumulated_power(gains, errors) -> float:
    """Delivered power (scale-free units) via stage-by-stage accumulation.

    Stage k+1 joins a combined signal of power equal to the running total,
    misaligned by its own phase error: q <- g + q + 2 cos(e) sqrt(g q).
    The first stage has no error term. Equals the direct pairwise form
    evaluated at phases carrying exactly those stage errors.
    """
    gains = np.asarray(gains, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if gains.shape != errors.shape:
        raise ValueError("gains and errors must have equal length")
    q = gains[0]
    for g, e in zip(gains[1:], errors[1:]):
        q = g + q + 2.0 * math.cos(e) * math.sqrt(g * q)
    return float(q)


def error_bound_power(gains, errors) -> float:
    """Scale-free lower-bound expression: every interference term discounted
    by the product of its two stage-error cosines."""
    gains = np.asarray(gains, dtype=float)
    errors = np.asarray(errors, dtype=float)
    amp = np.sqrt(gains)
    total = float(np.sum(gains))
    n = len(gains)
    for i in range(n):
        for j in range(n):
            if i != j:
                total += amp[i] * amp[j] * math.cos(errors[i]) * math.cos(errors[j])
    return total


def check_induction_inequality(
    s: Scenario, errors
) -> tuple[bool, float]:
    """Verify that accumulated power dominates the error-discounted bound.

    Returns (holds within 1e-9 slack, accumulated - bound). The guarantee
    is meaningful when every error magnitude is at most pi/2, where all
    cosines are non-negative; the first entry of ``errors`` should be 0
    for the equality case with two transmitters.
    """
    lhs = accumulated_power(s.gains, errors)
    rhs = error_bound_power(s.gains, errors)
    slack = lhs - rhs
    scale = max(abs(lhs), abs(rhs), 1e-300)
    return slack >= -1e-9 * scale, slack


def phases_from_errors(s: Scenario, errors) -> np.ndarray:
    """Construct transmit phases whose stage-by-stage misalignments are
    exactly ``errors`` (first entry ignored; the reference phase is 0)."""
    m_total = s.num_transmitters
    errors = np.asarray(errors, dtype=float)
    if len(errors) != m_total:
        raise ValueError("need one error per transmitter")
    phases = np.zeros(m_total)
    for m in range(1, m_total):
        active = np.zeros(m_total, dtype=bool)
        active[:m] = True
        ss = sum_signal(s, PhaseAssignment(phases.copy(), active))
        target = wrap_angle(s.channels[m].phase_shift - ss.phase_shift)
        phases[m] = wrap_angle(target + errors[m])
    return phases
