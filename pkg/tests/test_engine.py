"""Engine contracts: setup, collision detection, tick loop, determinism,
and grid/brute-force equivalence."""

import dataclasses
import io
import random

import pytest

from avflock.agents import ActionKind
from avflock.core import (AgentState, CollisionRule, Scenario, SimParams,
                          Team, WorldState, torus_distance_xy)
from avflock.engine import (RunResult, SpatialGrid, detect_collisions, run,
                            setup, tick)

TABLE1 = SimParams()  # defaults mirror the slow benchmark profile
RANDOM1 = dataclasses.replace(TABLE1, scenario=Scenario.RANDOM_WALK)


def world_at(positions, params=None, headings=None, speeds=None):
    params = params or TABLE1
    agents = [AgentState(id=i, team=Team.RED if i % 2 == 0 else Team.BLACK,
                         x=x, y=y,
                         heading=headings[i] if headings else 90.0,
                         speed=speeds[i] if speeds else params.min_velocity)
              for i, (x, y) in enumerate(positions)]
    return WorldState(agents=agents, params=params, rng=random.Random(0))


class TestSetup:
    def test_bit_identical_for_same_seed(self):
        w1 = setup(TABLE1, seed=7)
        w2 = setup(TABLE1, seed=7)
        assert w1.agents == w2.agents
        assert w1.rng.getstate() == w2.rng.getstate()

    def test_teams_and_headings(self):
        world = setup(TABLE1, seed=1)
        assert len(world.agents) == 80
        for a in world.agents:
            if a.team is Team.RED:
                assert a.heading == 90.0
            else:
                assert a.heading == 120.0
        assert sum(a.team is Team.RED for a in world.agents) == 40

    def test_all_speeds_start_at_min_velocity(self):
        world = setup(TABLE1, seed=2)
        assert all(a.speed == 0.3 for a in world.agents)
        assert all(a.collisions == 0 for a in world.agents)
        assert all(not a.collision_done for a in world.agents)

    def test_positions_canonical(self):
        world = setup(SimParams(n_red=100, n_black=100), seed=3)
        for a in world.agents:
            assert 0 <= a.x < 100 and 0 <= a.y < 100

    def test_rejects_empty_world(self):
        with pytest.raises(ValueError, match="no agents"):
            setup(SimParams(n_red=0, n_black=0), seed=1)

    def test_ids_are_list_indices(self):
        world = setup(TABLE1, seed=4)
        assert [a.id for a in world.agents] == list(range(80))


class TestDetectCollisions:
    def test_first_touch_is_one_pair_event(self):
        world = world_at([(10.0, 10.0), (10.0, 10.0)])
        assert detect_collisions(world, 1.0) == 1
        assert world.total_collisions == 1
        assert [a.collisions for a in world.agents] == [1, 1]
        assert all(a.collision_done for a in world.agents)

    def test_sustained_overlap_not_recounted(self):
        world = world_at([(10.0, 10.0), (10.0, 10.0)])
        detect_collisions(world, 1.0)
        assert detect_collisions(world, 1.0) == 0
        assert world.total_collisions == 1

    def test_reentry_counts_again(self):
        world = world_at([(10.0, 10.0), (10.0, 10.0)])
        detect_collisions(world, 1.0)
        world.agents[1].x = 20.0  # separate
        assert detect_collisions(world, 1.0) == 0
        assert not any(a.collision_done for a in world.agents)
        world.agents[1].x = 10.0  # rejoin
        assert detect_collisions(world, 1.0) == 1
        assert world.total_collisions == 2

    def test_three_mutual_overlaps_make_three_pair_events(self):
        world = world_at([(10.0, 10.0), (10.2, 10.0), (10.0, 10.2)])
        assert detect_collisions(world, 1.0) == 3
        assert [a.collisions for a in world.agents] == [2, 2, 2]

    def test_boundary_is_strict(self):
        world = world_at([(10.0, 10.0), (11.0, 10.0)])
        assert detect_collisions(world, 1.0) == 0

    def test_agent_entry_rule_doubles_pair_count(self):
        params = dataclasses.replace(TABLE1, collision_rule=CollisionRule.AGENT_ENTRY)
        world = world_at([(10.0, 10.0), (10.0, 10.0)], params=params)
        assert detect_collisions(world, 1.0) == 2
        assert detect_collisions(world, 1.0) == 0

    def test_overlap_rule_counts_every_tick(self):
        params = dataclasses.replace(TABLE1, collision_rule=CollisionRule.OVERLAP)
        world = world_at([(10.0, 10.0), (10.0, 10.0)], params=params)
        assert detect_collisions(world, 1.0) == 1
        assert detect_collisions(world, 1.0) == 1
        assert world.total_collisions == 2

    def test_zero_radius_rejected(self):
        world = world_at([(0.0, 0.0)])
        with pytest.raises(ValueError):
            detect_collisions(world, 0.0)


class TestTick:
    def test_single_agent_moves_and_keeps(self):
        world = world_at([(10.0, 10.0)])
        tick(world)
        a = world.agents[0]
        assert a.x == pytest.approx(10.3, abs=1e-12)  # heading 90 = +x
        assert a.y == pytest.approx(10.0, abs=1e-12)
        assert world.last_actions == [ActionKind.KEEP]
        assert world.total_collisions == 0
        assert world.tick == 1

    def test_close_parallel_pair_mirrors(self):
        world = world_at([(10.0, 10.0), (10.5, 10.0)], speeds=[0.3, 0.3])
        tick(world)
        assert world.last_actions == [ActionKind.MIRROR, ActionKind.MIRROR]
        a, b = world.agents
        assert a.heading == b.heading == 90.0
        assert a.speed == b.speed == pytest.approx(0.2)
        assert world.total_collisions == 1  # 0.5 m < collision radius 1

    def test_mutual_mirror_swaps_headings_from_snapshot(self):
        world = world_at([(10.0, 10.0), (10.5, 10.0)], headings=[90.0, 120.0],
                         speeds=[0.3, 0.3])
        tick(world)
        a, b = world.agents
        assert a.heading == 120.0 and b.heading == 90.0

    def test_recovery_accelerates_back_to_cruise(self):
        world = world_at([(10.0, 10.0)], speeds=[0.1])
        world.agents[0].recovering = True
        tick(world)
        a = world.agents[0]
        assert world.last_actions == [ActionKind.ACCELERATE]
        assert a.speed == pytest.approx(0.2) and a.recovering
        tick(world)
        assert a.speed == pytest.approx(0.3) and not a.recovering
        tick(world)
        assert world.last_actions == [ActionKind.KEEP]

    def test_mutual_threat_grinds_to_a_halt(self):
        # head-on pair: mirroring swaps headings and ratchets speed to zero
        # while the threat persists, leaving a frozen pair (counted once)
        world = world_at([(10.0, 10.0), (10.0, 10.95)], headings=[0.0, 180.0],
                         speeds=[0.3, 0.3])
        tick(world)
        a, b = world.agents
        assert a.recovering and b.recovering
        assert a.speed == pytest.approx(0.2)
        for _ in range(6):
            tick(world)
        assert a.speed == 0.0 and b.speed == 0.0
        assert world.total_collisions == 1
        pos = (a.x, a.y, b.x, b.y)
        tick(world)
        assert (a.x, a.y, b.x, b.y) == pos

    def test_deterministic_successor(self):
        for scenario in Scenario:
            params = dataclasses.replace(TABLE1, scenario=scenario)
            w1 = setup(params, seed=5)
            w2 = setup(params, seed=5)
            for _ in range(30):
                tick(w1)
                tick(w2)
            assert w1.agents == w2.agents
            assert w1.total_collisions == w2.total_collisions
            assert w1.rng.getstate() == w2.rng.getstate()

    def test_random_walk_consumes_two_draws_per_agent(self):
        params = dataclasses.replace(RANDOM1, n_red=3, n_black=2)
        world = setup(params, seed=11)
        shadow = random.Random(11)
        for _ in range(5):  # replay setup position draws (x then y per agent)
            shadow.uniform(0.0, 100.0)
            shadow.uniform(0.0, 100.0)
        expected = [(shadow.randrange(89), shadow.randrange(200)) for _ in range(5)]
        tick(world)
        for a, (_, h2) in zip(world.agents, expected):
            assert a.heading == float(h2)

    def test_conservation_and_monotone_tallies(self):
        world = setup(TABLE1, seed=6)
        reds = sum(a.team is Team.RED for a in world.agents)
        prev = [0] * 80
        for _ in range(50):
            tick(world)
            assert len(world.agents) == 80
            assert sum(a.team is Team.RED for a in world.agents) == reds
            assert [a.id for a in world.agents] == list(range(80))
            now = [a.collisions for a in world.agents]
            assert all(b >= a for a, b in zip(prev, now))
            prev = now


class TestRun:
    def test_same_seed_identical_result(self):
        r1 = run(TABLE1, seed=3)
        r2 = run(TABLE1, seed=3)
        assert r1 == r2

    def test_per_tick_series_sums_to_total(self):
        r = run(dataclasses.replace(TABLE1, ticks=200), seed=4)
        assert len(r.collisions_per_tick) == 200
        assert sum(r.collisions_per_tick) == r.total_collisions
        assert all(c >= 0 for c in r.collisions_per_tick)

    def test_seed_echo_and_params_echo(self):
        params = dataclasses.replace(TABLE1, ticks=5)
        r = run(params, seed=42)
        assert r.seed == 42 and r.params == params
        r2 = run(dataclasses.replace(params, seed=9))
        assert r2.seed == 9

    def test_random_walk_exceeds_social_at_benchmark_scale(self):
        # direction of the headline comparison at 80+80, identical seed
        social = dataclasses.replace(TABLE1, n_red=80, n_black=80)
        rnd = dataclasses.replace(RANDOM1, n_red=80, n_black=80)
        assert run(rnd, seed=1).total_collisions > run(social, seed=1).total_collisions

    def test_zero_sonar_degenerates_to_straight_lines(self):
        params = dataclasses.replace(TABLE1, sonar_range=0.0, ticks=100,
                                     n_red=10, n_black=10)
        world = setup(params, seed=8)
        for _ in range(100):
            tick(world)
            assert all(k is ActionKind.KEEP for k in world.last_actions)
        for a in world.agents:
            assert a.heading in (90.0, 120.0)
            assert a.speed == params.min_velocity

    def test_speed_bounds_hold_every_tick(self):
        fast = SimParams(n_red=20, n_black=20, min_velocity=0.5,
                         max_velocity=0.9, deceleration=0.3, ticks=300)
        for scenario in Scenario:
            params = dataclasses.replace(fast, scenario=scenario)
            world = setup(params, seed=13)
            lo = 0.0 if scenario is Scenario.ALL_SOCIAL_AVS else params.min_velocity
            for _ in range(300):
                tick(world)
                for a in world.agents:
                    assert lo <= a.speed <= params.max_velocity

    def test_trace_stream_format_and_determinism(self):
        params = dataclasses.replace(TABLE1, n_red=2, n_black=1, ticks=3)
        buf1, buf2 = io.StringIO(), io.StringIO()
        run(params, seed=2, trace=buf1)
        run(params, seed=2, trace=buf2)
        assert buf1.getvalue() == buf2.getvalue()
        lines = buf1.getvalue().splitlines()
        assert lines[0] == "tick,agent,x,y,heading,speed,action"
        assert len(lines) == 1 + 3 * 3
        first = lines[1].split(",")
        assert first[0] == "1" and first[1] == "0" and first[6] in (
            "Keep", "Mirror", "Accelerate", "RandomWalk")


def brute_neighbors(agents, i, r, w, h):
    a = agents[i]
    return {j for j, b in enumerate(agents)
            if j != i and torus_distance_xy(a.x, a.y, b.x, b.y, w, h) <= r}


def brute_pairs(agents, r, w, h):
    out = set()
    for i, a in enumerate(agents):
        for j in range(i + 1, len(agents)):
            b = agents[j]
            if torus_distance_xy(a.x, a.y, b.x, b.y, w, h) < r:
                out.add((i, j))
    return out


class TestSpatialGrid:
    def test_every_agent_in_exactly_one_bucket(self):
        world = setup(TABLE1, seed=9)
        grid = SpatialGrid(100.0, 100.0, 2.5)
        grid.rebuild(world.agents)
        ids = [i for bucket in grid.buckets.values() for i in bucket]
        assert sorted(ids) == list(range(80))

    def test_matches_brute_force_on_random_worlds(self):
        rng = random.Random(123)
        for _ in range(200):
            w = rng.uniform(8.0, 60.0)
            h = rng.uniform(8.0, 60.0)
            sonar = rng.uniform(0.0, min(w, h) / 2.01)
            radius = rng.uniform(0.05, max(sonar, 0.5))
            n = rng.randrange(2, 40)
            agents = [AgentState(id=i, team=Team.RED, x=rng.uniform(0, w),
                                 y=rng.uniform(0, h), heading=0.0, speed=0.0)
                      for i in range(n)]
            grid = SpatialGrid(w, h, max(sonar, radius))
            grid.rebuild(agents)
            grid_pairs = set()
            for i, a in enumerate(agents):
                cands = grid.candidates(a.x, a.y)
                near = {j for j in cands if j != i
                        and torus_distance_xy(a.x, a.y, agents[j].x, agents[j].y,
                                              w, h) <= sonar}
                assert near == brute_neighbors(agents, i, sonar, w, h)
                for j in cands:
                    if j > i and torus_distance_xy(a.x, a.y, agents[j].x,
                                                   agents[j].y, w, h) < radius:
                        grid_pairs.add((i, j))
            assert grid_pairs == brute_pairs(agents, radius, w, h)

    def test_tiny_grid_neighborhoods_deduplicate(self):
        # 2x2 cells: the wrapped 3x3 stencil collapses without double counting
        grid = SpatialGrid(5.2, 5.2, 2.5)
        assert grid.nx == 2 and grid.ny == 2
        agents = [AgentState(id=i, team=Team.RED, x=x, y=y, heading=0.0, speed=0.0)
                  for i, (x, y) in enumerate([(0.5, 0.5), (3.0, 3.0), (4.9, 0.1)])]
        grid.rebuild(agents)
        cands = grid.candidates(0.5, 0.5)
        assert sorted(cands) == [0, 1, 2]
        assert len(cands) == len(set(cands))
