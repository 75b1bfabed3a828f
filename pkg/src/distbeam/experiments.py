"""Seeded Monte Carlo experiment drivers and CSV/metadata emission.

Each experiment sweeps a parameter, averages over independent trials and
emits one CSV file per curve plus a JSON run record. Trial randomness is
counter-derived (one stream per trial index), so results are byte-identical
across runs and across worker counts; aggregation always happens in trial
order.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from ._version import __version__
from .baseline import DEFAULT_SCALE, PerturbationConfig, run_random_perturbation
from .channel import Scenario, ScenarioDistribution, generate_scenario
from .power import PhaseAssignment, harvested_power, optimal_power
from .protocol import efficiency_lower_bound, run_protocol

EXP_EFFICIENCY = "efficiency-vs-N"
EXP_POWER = "power-vs-M"
EXP_CONVERGENCE = "convergence-comparison"
EXP_OVERHEAD = "overhead-tradeoff"

# stream-domain tags keeping the experiments' random draws disjoint
_DOMAIN = {
    EXP_EFFICIENCY: 1,
    EXP_POWER: 2,
    EXP_CONVERGENCE: 3,
    EXP_OVERHEAD: 4,
}


def rng_stream(seed: int, *path: int) -> np.random.Generator:
    """Independent generator addressed by (seed, *path); order-insensitive
    with respect to when streams are created or consumed."""
    seed = int(seed) & (2**63 - 1)
    return np.random.default_rng(np.random.SeedSequence([seed, *path]))


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything an experiment run depends on; hashable to a run fingerprint."""

    experiment: str
    trials: int = 1000
    seed: int = 12345
    workers: int = 1
    out_dir: str = "out"
    n_list: tuple[int, ...] = (1, 2, 3, 4, 5, 6, 7, 8)
    m_list: tuple[int, ...] = (5, 10)
    budgets: tuple[int, ...] = (5, 10, 15, 20, 25, 30, 40, 50, 60, 80, 100, 150, 200, 300)
    intervals: int = 300
    n_adapt: int = 5
    perturb_scale: float = DEFAULT_SCALE
    # whether probe transmissions during training count as harvested energy
    # in the overhead averages; the receiver is busy measuring, so not by default
    count_training_energy: bool = False
    ref_attenuation: float = 1e-2
    ref_distance: float = 1.0
    path_loss_exponent: float = 3.0
    distance_min: float = 5.0
    distance_max: float = 15.0
    transmit_power: float = 1.0
    conversion_eff: float = 1.0

    def __post_init__(self):
        if self.experiment not in _DOMAIN:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.n_list or not self.m_list or not self.budgets:
            raise ValueError("sweep lists must be non-empty")

    @classmethod
    def defaults_for(cls, experiment: str, **overrides) -> "ExperimentConfig":
        base = {
            EXP_EFFICIENCY: dict(trials=1000, m_list=(5, 10)),
            EXP_POWER: dict(trials=1, m_list=tuple(range(2, 11)),
                            n_list=(1, 2, 3, 5)),
            EXP_CONVERGENCE: dict(trials=1, m_list=(5, 7)),
            EXP_OVERHEAD: dict(trials=5000, m_list=(5,)),
        }.get(experiment, {})
        base.update(overrides)
        return cls(experiment=experiment, **base)

    def distribution(self, num_transmitters: int) -> ScenarioDistribution:
        return ScenarioDistribution(
            num_transmitters=num_transmitters,
            ref_attenuation=self.ref_attenuation,
            ref_distance=self.ref_distance,
            path_loss_exponent=self.path_loss_exponent,
            distance_range=(self.distance_min, self.distance_max),
            transmit_power=self.transmit_power,
            conversion_eff=self.conversion_eff,
        )


def config_to_mapping(cfg: ExperimentConfig) -> dict:
    out = {}
    for f in dataclasses.fields(cfg):
        val = getattr(cfg, f.name)
        if isinstance(val, tuple):
            val = ",".join(str(v) for v in val)
        out[f.name] = val
    return out


def config_hash(cfg: ExperimentConfig) -> str:
    """Fingerprint of the fully-resolved configuration."""
    mapping = config_to_mapping(cfg)
    canon = "\n".join(f"{k}={_canon_value(mapping[k])}" for k in sorted(mapping))
    return hashlib.sha256(canon.encode()).hexdigest()


def _canon_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def parse_config_text(text: str) -> dict:
    """Parse the flat key=value config format ('#' starts a comment)."""
    mapping = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        key, val = (part.strip() for part in line.split("=", 1))
        mapping[key] = val
    return mapping


def config_from_mapping(mapping: dict) -> ExperimentConfig:
    """Build a config from string-valued keys, applying per-experiment defaults."""
    mapping = dict(mapping)
    if "experiment" not in mapping:
        raise ValueError("config requires an 'experiment' key")
    experiment = mapping.pop("experiment")
    kwargs = {}
    types = {f.name: f.type for f in dataclasses.fields(ExperimentConfig)}
    for key, raw in mapping.items():
        if key not in types:
            raise ValueError(f"unknown config key {key!r}")
        kwargs[key] = _parse_value(key, raw)
    return ExperimentConfig.defaults_for(experiment, **kwargs)


def _parse_value(key: str, raw):
    if not isinstance(raw, str):
        return raw
    if key in ("trials", "seed", "workers", "intervals", "n_adapt"):
        return int(raw)
    if key in ("n_list", "m_list", "budgets"):
        return tuple(int(v) for v in raw.split(",") if v.strip())
    if key == "count_training_energy":
        return raw.strip().lower() in ("1", "true", "yes", "on")
    if key == "out_dir":
        return raw
    return float(raw)


@dataclass(frozen=True)
class ResultRow:
    curve: str
    x: float
    mean: float
    stderr: float


@dataclass
class ExperimentResult:
    """Tabular sweep output plus the run record that reproduces it."""

    experiment: str
    x_name: str
    rows: list[ResultRow]
    metadata: dict

    def curve(self, name: str) -> list[ResultRow]:
        return [r for r in self.rows if r.curve == name]

    def curve_names(self) -> list[str]:
        seen = []
        for r in self.rows:
            if r.curve not in seen:
                seen.append(r.curve)
        return seen

    def write(self, out_dir: str | Path) -> list[Path]:
        """Write <out>/<experiment>/<curve>.csv files plus metadata.json."""
        base = Path(out_dir) / self.experiment
        base.mkdir(parents=True, exist_ok=True)
        written = []
        for name in self.curve_names():
            path = base / f"{name}.csv"
            with open(path, "w") as fh:
                fh.write(f"{self.x_name},mean,stderr\n")
                for r in self.curve(name):
                    fh.write(f"{_fmt(r.x)},{r.mean:.15g},{r.stderr:.15g}\n")
            written.append(path)
        meta_path = base / "metadata.json"
        with open(meta_path, "w") as fh:
            json.dump(self.metadata, fh, indent=2, sort_keys=True)
            fh.write("\n")
        written.append(meta_path)
        return written


def _fmt(x) -> str:
    if float(x).is_integer():
        return str(int(x))
    return format(float(x), ".15g")


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is not None:
        dt = datetime.fromtimestamp(int(epoch), tz=timezone.utc)
    else:
        dt = datetime.now(tz=timezone.utc)
    return dt.isoformat()


def _metadata(cfg: ExperimentConfig) -> dict:
    meta = dict(config_to_mapping(cfg))
    meta["config_hash"] = config_hash(cfg)
    meta["timestamp"] = _timestamp()
    meta["version"] = __version__
    return meta


def _map_trials(fn, trials: int, workers: int) -> list:
    if workers <= 1:
        return [fn(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(trials)))


def _mean_stderr(values: np.ndarray) -> tuple[float, float]:
    mean = float(np.mean(values))
    if values.size < 2:
        return mean, 0.0
    return mean, float(np.std(values, ddof=1) / math.sqrt(values.size))


def run_efficiency_vs_n(cfg: ExperimentConfig) -> ExperimentResult:
    """Mean efficiency and its closed-form lower bound versus the per-stage
    feedback budget, one curve pair per system size."""
    domain = _DOMAIN[cfg.experiment]
    rows = []
    for m in cfg.m_list:
        dist = cfg.distribution(m)

        def one_trial(t, m=m, dist=dist):
            scen, _ = generate_scenario(dist, rng_stream(cfg.seed, domain, m, t))
            etas, bounds = [], []
            for n in cfg.n_list:
                res = run_protocol(scen, n)
                etas.append(res.eta)
                bounds.append(efficiency_lower_bound(scen, n))
            return etas, bounds

        results = _map_trials(one_trial, cfg.trials, cfg.workers)
        etas = np.array([r[0] for r in results])      # (trials, len(n_list))
        bounds = np.array([r[1] for r in results])
        for j, n in enumerate(cfg.n_list):
            mean, se = _mean_stderr(etas[:, j])
            rows.append(ResultRow(f"eta_M{m}", n, mean, se))
        for j, n in enumerate(cfg.n_list):
            mean, se = _mean_stderr(bounds[:, j])
            rows.append(ResultRow(f"bound_M{m}", n, mean, se))
    return ExperimentResult(cfg.experiment, "N", rows, _metadata(cfg))


def run_power_vs_m(cfg: ExperimentConfig) -> ExperimentResult:
    """Delivered power versus system size on one pinned realization, with
    the no-adaptation and optimal references."""
    domain = _DOMAIN[cfg.experiment]
    m_max = max(cfg.m_list)
    dist = cfg.distribution(m_max)
    full, _ = generate_scenario(dist, rng_stream(cfg.seed, domain))
    rows = []
    for m in cfg.m_list:
        scen = Scenario(
            transmit_power=full.transmit_power,
            carrier_freq=full.carrier_freq,
            conversion_eff=full.conversion_eff,
            channels=full.channels[:m],
        )
        rows.append(ResultRow("optimal", m, optimal_power(scen), 0.0))
        zero = harvested_power(scen, PhaseAssignment(np.zeros(m)))
        rows.append(ResultRow("no_adaptation", m, zero, 0.0))
        for n in cfg.n_list:
            if m < 2:
                q = optimal_power(scen)
            else:
                q = run_protocol(scen, n).q_d
            rows.append(ResultRow(f"adapted_N{n}", m, q, 0.0))
    # group rows per curve in sweep order
    rows.sort(key=lambda r: (r.curve, r.x))
    return ExperimentResult(cfg.experiment, "M", rows, _metadata(cfg))


def protocol_trajectory(res, total_intervals: int) -> np.ndarray:
    """Per-interval received power of a protocol run: the two probe powers
    averaged while a stage trains, then the delivered power once done."""
    parts = [tr.interval_powers() for tr in res.traces]
    traj = np.concatenate(parts) if parts else np.zeros(0)
    if total_intervals > traj.size:
        tail = np.full(total_intervals - traj.size, res.q_d)
        traj = np.concatenate([traj, tail])
    return traj[:total_intervals]


def run_convergence_comparison(cfg: ExperimentConfig) -> ExperimentResult:
    """Power trajectories of the sequential protocol and the perturbation
    baseline on one pinned realization per system size."""
    domain = _DOMAIN[cfg.experiment]
    rows = []
    for m in cfg.m_list:
        dist = cfg.distribution(m)
        scen, _ = generate_scenario(dist, rng_stream(cfg.seed, domain, m))
        res = run_protocol(scen, cfg.n_adapt)
        traj = protocol_trajectory(res, cfg.intervals)
        for i, p in enumerate(traj, start=1):
            rows.append(ResultRow(f"proposed_M{m}", i, float(p), 0.0))
        pert = PerturbationConfig(scale=cfg.perturb_scale,
                                  max_intervals=cfg.intervals)
        trace = run_random_perturbation(
            scen, pert, rng=rng_stream(cfg.seed, domain, m, 1)
        )
        for i in range(cfg.intervals):
            rows.append(ResultRow(f"baseline_M{m}", i + 1,
                                  float(trace.best_power[i]), 0.0))
        rows.append(ResultRow(f"optimal_M{m}", cfg.intervals,
                              optimal_power(scen), 0.0))
    meta = _metadata(cfg)
    # one feedback bit per interval for both schemes; the sequential
    # protocol transmits two probes per interval, the baseline one
    meta["probes_per_interval"] = {"proposed": 2, "baseline": 1}
    return ExperimentResult(cfg.experiment, "interval", rows, meta)


#: Fig-8-style policies: number of strongest transmitters left on, by curve.
OVERHEAD_POLICIES = (
    ("all_on", 5),
    ("drop_weakest_1", 4),
    ("drop_weakest_2", 3),
)


def run_overhead_tradeoff(cfg: ExperimentConfig) -> ExperimentResult:
    """Average power per interval versus the total interval budget, for
    policies that switch off the weakest transmitters to shorten training.

    Each budget splits into a training prefix and an energy-delivery
    remainder. Probe transmissions during training deliver energy only when
    ``count_training_energy`` is set; by default the receiver spends those
    intervals measuring, so a budget shorter than the training phase
    averages to the truncated (training-only) credit.
    """
    domain = _DOMAIN[cfg.experiment]
    m = cfg.m_list[0]
    dist = cfg.distribution(m)
    policies = [(name, m_on) for name, m_on in OVERHEAD_POLICIES if m_on <= m]

    def one_trial(t):
        scen, _ = generate_scenario(dist, rng_stream(cfg.seed, domain, t))
        order = np.argsort(-scen.gains)
        channels = [scen.channels[i] for i in order]
        per_policy = {}
        for name, m_on in policies:
            sub = Scenario(scen.transmit_power, scen.carrier_freq,
                           scen.conversion_eff, channels[:m_on])
            res = run_protocol(sub, cfg.n_adapt)
            t_train = res.total_feedback_intervals
            traj = protocol_trajectory(res, t_train)
            averages = []
            for b in cfg.budgets:
                if cfg.count_training_energy:
                    credit = float(np.sum(traj[: min(b, t_train)]))
                else:
                    credit = 0.0
                credit += max(0, b - t_train) * res.q_d
                averages.append(credit / b)
            per_policy[name] = averages
        q0 = harvested_power(scen, PhaseAssignment(np.zeros(m)))
        per_policy["no_adaptation"] = [q0 for _ in cfg.budgets]
        per_policy["optimal"] = [optimal_power(scen) for _ in cfg.budgets]
        return per_policy

    results = _map_trials(one_trial, cfg.trials, cfg.workers)
    rows = []
    for name in [p[0] for p in policies] + ["no_adaptation", "optimal"]:
        table = np.array([r[name] for r in results])   # (trials, budgets)
        for j, b in enumerate(cfg.budgets):
            mean, se = _mean_stderr(table[:, j])
            rows.append(ResultRow(name, b, mean, se))
    return ExperimentResult(cfg.experiment, "budget", rows, _metadata(cfg))


EXPERIMENTS = {
    EXP_EFFICIENCY: run_efficiency_vs_n,
    EXP_POWER: run_power_vs_m,
    EXP_CONVERGENCE: run_convergence_comparison,
    EXP_OVERHEAD: run_overhead_tradeoff,
}


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    return EXPERIMENTS[cfg.experiment](cfg)
