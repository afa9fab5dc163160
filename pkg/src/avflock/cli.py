"""Command-line surface: single runs, sweeps, scenario comparison, and
relative-position trajectory dumps.

The CLI is a thin shell over the library; it owns flag parsing, exit codes
(0 ok, 2 usage error, 1 runtime failure) and file emission only. Data files
carry no timestamps, so identical invocations produce identical bytes.
"""

from __future__ import annotations

import argparse
import os
import sys
import warnings

from . import __version__
from .core import CollisionRule, Scenario, SimParams
from .engine import run
from .experiments import (ExperimentSpec, builtin_set, efficiency, export_csv,
                          load_spec, run_experiment)
from .richardson import PairState, RichardsonParams, fixed_point, simulate, stability

_SCENARIO_FLAGS = {"social": Scenario.ALL_SOCIAL_AVS, "random": Scenario.RANDOM_WALK}
_RULE_FLAGS = {r.value: r for r in CollisionRule}


def _out_path(path: str) -> str:
    """Resolve an output path; AVFLOCK_OUT_DIR prefixes relative paths."""
    base = os.environ.get("AVFLOCK_OUT_DIR")
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def _add_param_flags(parser: argparse.ArgumentParser, with_scenario: bool) -> None:
    with warnings.catch_warnings():
        # defaults are the benchmark profile; only user-chosen values warn
        warnings.simplefilter("ignore")
        d = SimParams()
    g = parser.add_argument_group("simulation parameters")
    g.add_argument("--red", type=int, default=d.n_red, metavar="N",
                   help="number of red vehicles (default %(default)s)")
    g.add_argument("--black", type=int, default=d.n_black, metavar="N",
                   help="number of black vehicles (default %(default)s)")
    if with_scenario:
        g.add_argument("--scenario", choices=sorted(_SCENARIO_FLAGS),
                       default="social", help="behavior mode (default %(default)s)")
    g.add_argument("--min-velocity", type=float, default=d.min_velocity)
    g.add_argument("--max-velocity", type=float, default=d.max_velocity)
    g.add_argument("--max-acceleration", type=float, default=d.max_acceleration)
    g.add_argument("--deceleration", type=float, default=d.deceleration)
    g.add_argument("--safety-distance", type=float, default=d.min_safety_distance,
                   help="threat threshold on nearest-neighbor distance, m")
    g.add_argument("--sonar-range", type=float, default=d.sonar_range)
    g.add_argument("--world-width", type=float, default=d.world_width)
    g.add_argument("--world-height", type=float, default=d.world_height)
    g.add_argument("--collision-radius", type=float, default=d.collision_radius)
    g.add_argument("--ticks", type=int, default=d.ticks)
    g.add_argument("--collision-rule", choices=sorted(_RULE_FLAGS), default="pair",
                   help="how proximity events are counted (default %(default)s)")
    g.add_argument("--literal", action="store_true",
                   help="verbatim update rules: same-tick re-acceleration after "
                        "a mirror and additive random-walk slowdown")


def _params_from(args, scenario: Scenario, seed: int = 0) -> SimParams:
    return SimParams(
        n_red=args.red, n_black=args.black,
        min_velocity=args.min_velocity, max_velocity=args.max_velocity,
        max_acceleration=args.max_acceleration, deceleration=args.deceleration,
        min_safety_distance=args.safety_distance, sonar_range=args.sonar_range,
        scenario=scenario,
        world_width=args.world_width, world_height=args.world_height,
        collision_radius=args.collision_radius, ticks=args.ticks, seed=seed,
        collision_rule=_RULE_FLAGS[args.collision_rule],
        literal_rules=args.literal,
    )


def cmd_run(args) -> int:
    params = _params_from(args, _SCENARIO_FLAGS[args.scenario], args.seed)
    trace_fh = None
    if args.trace:
        trace_fh = open(_out_path(args.trace), "w", encoding="utf-8", newline="")
    try:
        result = run(params, args.seed, trace=trace_fh)
    finally:
        if trace_fh:
            trace_fh.close()
    red, black = result.per_team_collisions
    print(f"total collisions: {result.total_collisions} "
          f"(red {red}, black {black}) over {params.ticks} ticks, "
          f"scenario {params.scenario.value}, seed {result.seed}")
    if args.out:
        path = _out_path(args.out)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(f"# avflock {__version__}\n")
            fh.write("tick,collisions\n")
            for t, c in enumerate(result.collisions_per_tick, start=1):
                fh.write(f"{t},{c}\n")
        print(f"per-tick collisions written to {path}")
    return 0


def _print_rows(rows) -> None:
    print(f"{'set':<8}{'config':<8}{'scenario':<14}{'red':>5}{'black':>7}"
          f"{'reps':>6}{'mean':>12}{'stdev':>10}")
    for r in rows:
        print(f"{r.set_name:<8}{r.config_id:<8}{r.scenario.value:<14}"
              f"{r.params.n_red:>5}{r.params.n_black:>7}{r.n:>6}"
              f"{r.mean_collisions:>12.2f}{r.stdev_collisions:>10.2f}")


def cmd_sweep(args) -> int:
    if args.builtin:
        spec = builtin_set(args.builtin, ticks=args.ticks,
                           repetitions=args.reps, base_seed=args.base_seed)
    else:
        spec = load_spec(args.spec)
    if args.batches != 1:
        spec = ExperimentSpec(spec.name, spec.configurations, spec.repetitions,
                              spec.base_seed, args.batches)
    rows = run_experiment(spec, jobs=args.jobs)
    _print_rows(rows)
    if args.out:
        path = _out_path(args.out)
        export_csv(rows, path)
        print(f"summary written to {path}")
    return 0


def cmd_compare(args) -> int:
    social = _params_from(args, Scenario.ALL_SOCIAL_AVS)
    rnd = _params_from(args, Scenario.RANDOM_WALK)
    spec = ExperimentSpec("compare", (social, rnd),
                          repetitions=args.reps, base_seed=args.base_seed)
    rows = run_experiment(spec, jobs=args.jobs)
    by_scenario = {r.scenario: r for r in rows}
    s = by_scenario[Scenario.ALL_SOCIAL_AVS]
    r = by_scenario[Scenario.RANDOM_WALK]
    print(f"configuration: {args.red} red + {args.black} black, "
          f"{args.ticks} ticks, {args.reps} paired replicates")
    for row in (s, r):
        print(f"{row.scenario.value:<13}: mean {row.mean_collisions:.2f}  "
              f"stdev {row.stdev_collisions:.2f}  (n={row.n})")
    if r.mean_collisions > 0:
        eff = efficiency(r.mean_collisions, s.mean_collisions)
        print(f"efficiency: social agents cause {eff:.2f} % fewer collisions "
              f"than the random walk")
    else:
        print("efficiency: undefined (random-walk mean is 0)")
    return 0


def cmd_richardson(args) -> int:
    params = RichardsonParams(
        delta1=args.delta1, delta2=args.delta2,
        alpha1=args.alpha1, alpha2=args.alpha2,
        g1=args.g1, g2=args.g2, h1=args.h1, h2=args.h2)
    trajectory = simulate(PairState(args.v1, args.v2), params, args.steps)
    lines = [f"# avflock {__version__}", "step,v1,v2"]
    lines += [f"{i},{s.v1!r},{s.v2!r}" for i, s in enumerate(trajectory)]
    text = "\n".join(lines) + "\n"
    if args.out:
        path = _out_path(args.out)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        print(f"trajectory written to {path}")
    else:
        sys.stdout.write(text)
    report = stability(params)
    print(f"stability: {report.kind.value} (spectral radius {report.spectral_radius!r})")
    fp = fixed_point(params)
    if fp is None:
        print("fixed point: none (I - M is singular)")
    else:
        print(f"fixed point: v1={fp.v1!r} v2={fp.v2!r}")
    return 0


def cmd_version(args) -> int:
    print(f"avflock {__version__}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="avflock",
        description="Social collision avoidance for autonomous vehicles in "
                    "flock-like traffic: simulator, baseline, sweep harness.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one simulation run")
    _add_param_flags(p_run, with_scenario=True)
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--out", metavar="CSV", help="write per-tick collision counts")
    p_run.add_argument("--trace", metavar="PATH",
                       help="write a per-agent per-tick trace log")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run an experiment sweep")
    which = p_sweep.add_mutually_exclusive_group(required=True)
    which.add_argument("--builtin", choices=("set1", "set2"),
                       help="one of the benchmark sweeps")
    which.add_argument("--spec", metavar="FILE",
                       help="custom experiment file (INI schema, see README)")
    p_sweep.add_argument("--out", metavar="CSV", help="write the summary table")
    p_sweep.add_argument("--reps", type=int, default=8)
    p_sweep.add_argument("--base-seed", type=int, default=1000)
    p_sweep.add_argument("--ticks", type=int, default=1000)
    p_sweep.add_argument("--batches", type=int, default=1)
    p_sweep.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                         help="worker processes (default: logical cores)")
    p_sweep.set_defaults(func=cmd_sweep)

    p_cmp = sub.add_parser("compare",
                           help="run both scenarios paired and report efficiency")
    _add_param_flags(p_cmp, with_scenario=False)
    p_cmp.add_argument("--reps", type=int, default=8)
    p_cmp.add_argument("--base-seed", type=int, default=1000)
    p_cmp.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p_cmp.set_defaults(func=cmd_compare)

    p_rich = sub.add_parser(
        "richardson",
        help="dump a trajectory of the two-vehicle relative-position dynamics")
    p_rich.add_argument("--delta1", type=float, default=0.25)
    p_rich.add_argument("--delta2", type=float, default=0.25)
    p_rich.add_argument("--alpha1", type=float, default=-0.5)
    p_rich.add_argument("--alpha2", type=float, default=-0.5)
    p_rich.add_argument("--g1", type=float, default=0.0)
    p_rich.add_argument("--g2", type=float, default=0.0)
    p_rich.add_argument("--h1", type=float, default=0.0)
    p_rich.add_argument("--h2", type=float, default=0.0)
    p_rich.add_argument("--v1", type=float, default=1.0, help="initial v1")
    p_rich.add_argument("--v2", type=float, default=0.0, help="initial v2")
    p_rich.add_argument("--steps", type=int, default=20)
    p_rich.add_argument("--out", metavar="CSV")
    p_rich.set_defaults(func=cmd_richardson)

    p_ver = sub.add_parser("version", help="print the version")
    p_ver.set_defaults(func=cmd_version)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
