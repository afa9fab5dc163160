"""Batch experiment harness: parameter sweeps with paired seeding.

A sweep executes `repetitions` runs per configuration and reports the mean
and sample standard deviation of the total collision count. Configurations
that differ only in scenario share a seed group, so every replicate is
paired across scenarios (common random numbers) and their comparison
cancels shared sampling noise. Replicate k of seed group j runs with
seed = base_seed + j * repetitions + k.
"""

from __future__ import annotations

import configparser
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

from . import __version__
from .core import CollisionRule, Scenario, SimParams
from .engine import run

_CSV_HEADER = ("set,config_id,scenario,n_red,n_black,min_vel,max_vel,"
               "max_accel,decel,safety,sonar,ticks,reps,"
               "mean_collisions,stdev_collisions")

_POPULATIONS = (40, 50, 60, 70, 80)


@dataclass(frozen=True)
class ExperimentSpec:
    """A named sweep: configurations, replicate count, and seed schedule.

    `batches` repeats the whole sweep as independent replicate batches,
    each reported as its own summary row (seed-shifted so no seed repeats).
    """

    name: str
    configurations: tuple[SimParams, ...]
    repetitions: int = 8
    base_seed: int = 1000
    batches: int = 1

    def __post_init__(self) -> None:
        if not self.configurations:
            raise ValueError("an experiment needs at least one configuration")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.batches < 1:
            raise ValueError("batches must be >= 1")


@dataclass(frozen=True)
class SummaryRow:
    """Aggregate of the replicates of one (configuration, scenario, batch)."""

    set_name: str
    config_id: int
    scenario: Scenario
    params: SimParams
    n: int
    mean_collisions: float
    stdev_collisions: float
    batch: int = 0


def seed_groups(spec: ExperimentSpec) -> list[int]:
    """Seed-group index per configuration; scenario is ignored for grouping
    so paired scenarios replay identical seeds."""
    groups: dict[SimParams, int] = {}
    out = []
    for p in spec.configurations:
        key = replace(p, scenario=Scenario.ALL_SOCIAL_AVS)
        if key not in groups:
            groups[key] = len(groups)
        out.append(groups[key])
    return out


def _seed(spec: ExperimentSpec, n_groups: int, group: int, rep: int, batch: int) -> int:
    return spec.base_seed + (batch * n_groups + group) * spec.repetitions + rep


def _run_total(task: tuple[SimParams, int, int]) -> int:
    params, seed, config_id = task
    try:
        return run(params, seed).total_collisions
    except Exception as exc:
        try:
            annotated = type(exc)(f"configuration {config_id}: {exc}")
        except TypeError:
            annotated = RuntimeError(f"configuration {config_id}: {exc}")
        raise annotated from exc


def run_experiment(spec: ExperimentSpec, jobs: int = 1,
                   seed_fn=None) -> list[SummaryRow]:
    """Execute the sweep and aggregate each configuration's replicates.

    `jobs` > 1 distributes runs over worker processes; results are reduced
    in configuration order, so the output is identical for any job count.
    `seed_fn(group, rep)` overrides the seed schedule (testing hook).
    """
    groups = seed_groups(spec)
    n_groups = max(groups) + 1
    tasks: list[tuple[SimParams, int, int]] = []
    keys: list[tuple[int, int]] = []  # (configuration index, batch)
    for ci, params in enumerate(spec.configurations):
        for b in range(spec.batches):
            for k in range(spec.repetitions):
                if seed_fn is not None:
                    seed = seed_fn(groups[ci], k)
                else:
                    seed = _seed(spec, n_groups, groups[ci], k, b)
                tasks.append((params, seed, groups[ci]))
                keys.append((ci, b))

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            totals = list(pool.map(_run_total, tasks,
                                   chunksize=max(1, len(tasks) // (jobs * 4))))
    else:
        totals = [_run_total(t) for t in tasks]

    by_key: dict[tuple[int, int], list[int]] = {}
    for key, total in zip(keys, totals):
        by_key.setdefault(key, []).append(total)

    rows = []
    for ci, params in enumerate(spec.configurations):
        for b in range(spec.batches):
            samples = by_key[(ci, b)]
            mean = float(statistics.mean(samples))
            stdev = float(statistics.stdev(samples)) if len(samples) > 1 else 0.0
            rows.append(SummaryRow(
                set_name=spec.name,
                config_id=groups[ci],
                scenario=params.scenario,
                params=params,
                n=len(samples),
                mean_collisions=mean,
                stdev_collisions=stdev,
                batch=b,
            ))
    rows.sort(key=lambda r: (r.config_id, r.scenario.value, r.batch))
    return rows


def efficiency(random_mean: float, social_mean: float) -> float:
    """Percent reduction of the social mean relative to the random-walk mean."""
    if random_mean <= 0:
        raise ValueError(f"random-walk mean must be positive, got {random_mean}")
    return 100.0 * (1.0 - social_mean / random_mean)


def builtin_set(which: str, ticks: int = 1000, repetitions: int = 8,
                base_seed: int = 1000) -> ExperimentSpec:
    """The two benchmark sweeps over populations of 40..80 per team.

    "set1" runs the slow profile (velocity pinned to 0.3, deceleration 0.1),
    "set2" the fast one (velocity 0.5-0.9, deceleration 0.3); both use
    safety distance 1 and sonar range 2.5, and pair both scenarios per
    population.
    """
    which = which.lower()
    if which == "set1":
        sliders = dict(min_velocity=0.3, max_velocity=0.3, deceleration=0.1)
    elif which == "set2":
        sliders = dict(min_velocity=0.5, max_velocity=0.9, deceleration=0.3)
    else:
        raise ValueError(f"unknown builtin set {which!r} (expected set1 or set2)")
    configs = []
    for pop in _POPULATIONS:
        for scenario in (Scenario.ALL_SOCIAL_AVS, Scenario.RANDOM_WALK):
            configs.append(SimParams(
                n_red=pop, n_black=pop,
                max_acceleration=0.1,
                min_safety_distance=1.0, sonar_range=2.5,
                scenario=scenario, ticks=ticks,
                **sliders,
            ))
    return ExperimentSpec(name=which, configurations=tuple(configs),
                          repetitions=repetitions, base_seed=base_seed)


_SCENARIOS = {
    "social": (Scenario.ALL_SOCIAL_AVS,),
    "random": (Scenario.RANDOM_WALK,),
    "both": (Scenario.ALL_SOCIAL_AVS, Scenario.RANDOM_WALK),
}

_INT_FIELDS = {"n_red", "n_black", "ticks", "seed"}
_FLOAT_FIELDS = {"min_velocity", "max_velocity", "max_acceleration",
                 "deceleration", "min_safety_distance", "sonar_range",
                 "world_width", "world_height", "collision_radius"}


def load_spec(path: str) -> ExperimentSpec:
    """Read an ExperimentSpec from an INI-style file (schema in README).

    One [experiment] section (name, repetitions, base_seed, batches) and one
    section per configuration whose keys are SimParams fields; `scenario`
    accepts social, random, or both (both expands to a paired pair).
    """
    parser = configparser.ConfigParser()
    with open(path, "r", encoding="utf-8") as fh:
        parser.read_file(fh)
    exp = parser["experiment"] if parser.has_section("experiment") else {}
    name = exp.get("name", "custom")
    repetitions = int(exp.get("repetitions", 8))
    base_seed = int(exp.get("base_seed", 1000))
    batches = int(exp.get("batches", 1))
    configs: list[SimParams] = []
    for section in parser.sections():
        if section == "experiment":
            continue
        fields = {}
        scenarios = _SCENARIOS["both"]
        for key, raw in parser[section].items():
            if key == "scenario":
                if raw not in _SCENARIOS:
                    raise ValueError(
                        f"[{section}] scenario must be social, random or both, got {raw!r}")
                scenarios = _SCENARIOS[raw]
            elif key == "collision_rule":
                fields[key] = CollisionRule(raw)
            elif key == "literal_rules":
                fields[key] = parser[section].getboolean(key)
            elif key in _INT_FIELDS:
                fields[key] = int(raw)
            elif key in _FLOAT_FIELDS:
                fields[key] = float(raw)
            else:
                raise ValueError(f"[{section}] unknown parameter {key!r}")
        for scenario in scenarios:
            configs.append(SimParams(scenario=scenario, **fields))
    if not configs:
        raise ValueError(f"{path}: no configuration sections found")
    return ExperimentSpec(name=name, configurations=tuple(configs),
                          repetitions=repetitions, base_seed=base_seed,
                          batches=batches)


def format_rows(rows: list[SummaryRow]) -> str:
    """Render summary rows as CSV text (deterministic bytes)."""
    lines = [f"# avflock {__version__}", _CSV_HEADER]
    for r in rows:
        p = r.params
        lines.append(
            f"{r.set_name},{r.config_id},{r.scenario.value},"
            f"{p.n_red},{p.n_black},{p.min_velocity!r},{p.max_velocity!r},"
            f"{p.max_acceleration!r},{p.deceleration!r},"
            f"{p.min_safety_distance!r},{p.sonar_range!r},{p.ticks},{r.n},"
            f"{r.mean_collisions!r},{r.stdev_collisions!r}")
    return "\n".join(lines) + "\n"


def export_csv(rows: list[SummaryRow], path: str) -> None:
    """Write summary rows to `path`; reruns of the same spec are byte-identical."""
    text = format_rows(rows)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
