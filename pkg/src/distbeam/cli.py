"""Command-line interface.

Subcommands: ``adapt`` (one bisection run, prints its trace), ``protocol``
(full sequential run, prints the summary row), ``baseline`` (random
perturbation run), ``exp <name>`` (Monte Carlo experiment writing CSV
curves), ``verify`` (built-in oracle suite) and ``bound`` (closed-form
bound evaluation). Every command is deterministic for a fixed --seed.

Exit codes: 0 success, 1 usage error, 2 verification failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .baseline import DEFAULT_SCALE, DIST_GAUSSIAN, DIST_UNIFORM, PerturbationConfig, run_random_perturbation
from .channel import Channel, Scenario, ScenarioDistribution, generate_scenario
from .experiments import (
    EXPERIMENTS,
    config_from_mapping,
    config_hash,
    parse_config_text,
    rng_stream,
    run_experiment,
)
from .power import MODE_ADDITIVE_NOISE, MeasurementModel, PhaseAssignment
from .protocol import (
    InfeasibleEfficiencyTarget,
    efficiency_lower_bound,
    required_intervals,
    run_protocol,
)
from .selfcheck import run_all

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2
EXIT_IO = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="default 12345")
    common.add_argument("--trials", type=int, default=None)
    common.add_argument("--out", default=None, help="output directory")
    common.add_argument("--config", default=None, help="key=value config file")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--workers", type=int, default=None)
    return common


def _seed(args) -> int:
    return args.seed if args.seed is not None else 12345


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = _Parser(prog="distbeam", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("adapt", parents=[common],
                       help="run one phase-adaptation stage and print its trace")
    p.add_argument("--M", type=int, default=2)
    p.add_argument("--N", type=int, default=5)
    p.add_argument("--adapter", type=int, default=None,
                   help="1-based transmitter index that adapts (default: the last)")
    p.add_argument("--noise-std", type=float, default=0.0)

    p = sub.add_parser("protocol", parents=[common],
                       help="run the full sequential protocol")
    p.add_argument("--M", type=int, default=5)
    p.add_argument("--N", type=int, default=5)
    p.add_argument("--noise-std", type=float, default=0.0)

    p = sub.add_parser("baseline", parents=[common],
                       help="run the random-perturbation baseline")
    p.add_argument("--M", type=int, default=5)
    p.add_argument("--intervals", type=int, default=300)
    p.add_argument("--scale", type=float, default=DEFAULT_SCALE)
    p.add_argument("--dist", choices=("uniform", "gaussian"), default="uniform")

    p = sub.add_parser("exp", parents=[common],
                       help="run a Monte Carlo experiment and write CSV curves")
    p.add_argument("name", choices=sorted(EXPERIMENTS))
    p.add_argument("--n-list", default=None, help="comma-separated feedback budgets")
    p.add_argument("--m-list", default=None, help="comma-separated system sizes")
    p.add_argument("--budgets", default=None, help="comma-separated interval budgets")
    p.add_argument("--intervals", type=int, default=None)
    p.add_argument("--n-adapt", type=int, default=None)
    p.add_argument("--perturb-scale", type=float, default=None)
    p.add_argument("--count-training-energy", action="store_true", default=None)

    sub.add_parser("verify", parents=[common],
                   help="run the built-in oracle and property suite")

    p = sub.add_parser("bound", parents=[common],
                       help="evaluate the closed-form efficiency bounds")
    p.add_argument("--M", type=int, default=None)
    p.add_argument("--eta-hat", type=float, default=None,
                   help="target efficiency: print the required per-stage intervals")
    p.add_argument("--N", type=int, default=None,
                   help="per-stage intervals: print the efficiency lower bound")
    p.add_argument("--equal-gains", action="store_true")
    p.add_argument("--gains", default=None, help="comma-separated channel power gains")
    return parser


def _scenario_for(args, m: int) -> Scenario:
    dist = ScenarioDistribution(num_transmitters=m)
    scen, _ = generate_scenario(dist, rng_stream(_seed(args), 0))
    return scen


def _measurement(args) -> MeasurementModel:
    noise = getattr(args, "noise_std", 0.0)
    if noise and noise > 0.0:
        return MeasurementModel(MODE_ADDITIVE_NOISE, noise, rng_stream(_seed(args), 2))
    return MeasurementModel()


def _cmd_adapt(args) -> int:
    from .adapt import adapt_phase

    m_total = args.M
    adapter = (args.adapter if args.adapter is not None else m_total) - 1
    if not 0 <= adapter < m_total:
        raise _UsageError(f"--adapter must be in 1..{m_total}")
    scen = _scenario_for(args, m_total)
    active = np.ones(m_total, dtype=bool)
    active[adapter] = False
    pa = PhaseAssignment(np.zeros(m_total), active)
    phi, trace = adapt_phase(scen, pa, adapter, args.N, _measurement(args))
    if args.format == "json":
        payload = {
            "final_phase": phi,
            "target_phase": trace.target_phase,
            "records": [vars(r) | {"bit": bool(r.bit)} for r in trace.records],
        }
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        sys.stdout.write(trace.to_csv())
    return EXIT_OK


def _cmd_protocol(args) -> int:
    scen = _scenario_for(args, args.M)
    res = run_protocol(scen, args.N, _measurement(args))
    bound = efficiency_lower_bound(scen, args.N)
    if args.format == "json":
        payload = {
            "M": args.M,
            "N": args.N,
            "Q_d": res.q_d,
            "Q_star": res.q_star,
            "eta": res.eta,
            "bound": bound,
            "max_abs_error": float(np.max(np.abs(res.errors))),
            "final_phases": [float(p) for p in res.final_phases],
        }
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        sys.stdout.write(res.summary_csv(bound))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "summary.csv").write_text(res.summary_csv(bound))
        for i, trace in enumerate(res.traces, start=2):
            (out / f"trace_ET{i}.csv").write_text(trace.to_csv())
    return EXIT_OK


def _cmd_baseline(args) -> int:
    scen = _scenario_for(args, args.M)
    dist = DIST_UNIFORM if args.dist == "uniform" else DIST_GAUSSIAN
    cfg = PerturbationConfig(distribution=dist, scale=args.scale,
                             max_intervals=args.intervals)
    trace = run_random_perturbation(scen, cfg, rng=rng_stream(_seed(args), 1))
    if args.format == "json":
        payload = {
            "final_power": trace.final_power,
            "best_power": [float(p) for p in trace.best_power],
            "measured_power": [float(p) for p in trace.measured_power],
        }
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        sys.stdout.write(trace.to_csv())
    return EXIT_OK


def _cmd_exp(args) -> int:
    mapping = {}
    if args.config:
        mapping.update(parse_config_text(Path(args.config).read_text()))
    mapping["experiment"] = args.name
    overrides = {
        "trials": args.trials,
        "seed": args.seed,
        "workers": args.workers,
        "out_dir": args.out,
        "n_list": args.n_list,
        "m_list": args.m_list,
        "budgets": args.budgets,
        "intervals": args.intervals,
        "n_adapt": args.n_adapt,
        "perturb_scale": args.perturb_scale,
        "count_training_energy": args.count_training_energy,
    }
    for key, val in overrides.items():
        if val is not None:
            mapping[key] = val
    cfg = config_from_mapping(mapping)
    result = run_experiment(cfg)
    written = result.write(cfg.out_dir)
    print(f"config_hash {config_hash(cfg)}")
    for path in written:
        print(path.as_posix())
    return EXIT_OK


def _cmd_verify(args) -> int:
    results = run_all()
    failed = 0
    for r in results:
        tag = "ok" if r.ok else "FAIL"
        print(f"[{tag}] {r.name}: {r.detail}")
        failed += 0 if r.ok else 1
    if failed:
        print(f"{failed} of {len(results)} checks failed")
        return EXIT_VERIFY
    print(f"all {len(results)} checks passed")
    return EXIT_OK


def _cmd_bound(args) -> int:
    if args.gains:
        gains = [float(g) for g in args.gains.split(",") if g.strip()]
    elif args.equal_gains:
        if args.M is None:
            raise _UsageError("--equal-gains requires --M")
        gains = [1.0] * args.M
    else:
        raise _UsageError("bound needs --gains or --equal-gains with --M")
    scen = Scenario(1.0, 1.0, 1.0, [Channel(g, 0.0) for g in gains])
    if (args.eta_hat is None) == (args.N is None):
        raise _UsageError("bound needs exactly one of --eta-hat or --N")
    if args.eta_hat is not None:
        try:
            value = required_intervals(scen, args.eta_hat)
        except InfeasibleEfficiencyTarget as exc:
            print(f"infeasible: {exc}", file=sys.stderr)
            return EXIT_VERIFY
        print(f"{value:.4f}")
    else:
        print(f"{efficiency_lower_bound(scen, args.N):.15g}")
    return EXIT_OK


_COMMANDS = {
    "adapt": _cmd_adapt,
    "protocol": _cmd_protocol,
    "baseline": _cmd_baseline,
    "exp": _cmd_exp,
    "verify": _cmd_verify,
    "bound": _cmd_bound,
}


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
