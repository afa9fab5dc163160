"""Deterministic tick loop: setup, movement, behavior, collision counting.

Update order per tick (social scenario): every agent moves forward, the
world is frozen, every agent's behavior is evaluated against that snapshot
in id order, actions are applied in id order, then collisions are detected
on the post-move positions. The random-walk scenario interleaves its two
moves per agent as the baseline procedure dictates; its behavior reads no
neighbor state, so per-agent application is snapshot-equivalent.

All randomness flows through one seeded generator consumed in agent-id
order, which makes run(params, seed) referentially transparent.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .agents import ActionKind, random_walk_step, social_step
from .core import (AgentState, CollisionRule, Scenario, SimParams, Team,
                   WorldState, _wrap1, displace, torus_distance_xy)


class SpatialGrid:
    """Uniform bucket grid over the torus for broad-phase neighbor queries.

    Cells are at least `cell_size` wide, so any query with radius at most
    cell_size is answered from the 3x3 wrapped cell neighborhood. The grid
    is a pure accelerator: results must match a full O(n^2) scan exactly.
    """

    def __init__(self, width: float, height: float, cell_size: float):
        if cell_size <= 0:
            raise ValueError("cell_size must be positive")
        self.cell_size = cell_size
        self.nx = max(1, int(width / cell_size))
        self.ny = max(1, int(height / cell_size))
        self._sx = self.nx / width
        self._sy = self.ny / height
        self.buckets: dict[int, list[int]] = {}
        self._hoods: dict[int, tuple[int, ...]] = {}
        self._cands: dict[int, list[int]] = {}

    def rebuild(self, agents: list[AgentState]) -> None:
        """Re-bucket every agent by its wrapped position."""
        buckets = self.buckets
        buckets.clear()
        self._cands.clear()
        nx, ny = self.nx, self.ny
        sx, sy = self._sx, self._sy
        for a in agents:
            cx = int(a.x * sx)
            cy = int(a.y * sy)
            if cx >= nx:  # canonical x < width, but the product can round up
                cx = nx - 1
            if cy >= ny:
                cy = ny - 1
            key = cx * ny + cy
            b = buckets.get(key)
            if b is None:
                buckets[key] = [a.id]
            else:
                b.append(a.id)

    def _hood(self, cx: int, cy: int) -> tuple[int, ...]:
        key = cx * self.ny + cy
        hood = self._hoods.get(key)
        if hood is None:
            nx, ny = self.nx, self.ny
            cells = {((cx + dx) % nx) * ny + ((cy + dy) % ny)
                     for dx in (-1, 0, 1) for dy in (-1, 0, 1)}
            hood = self._hoods[key] = tuple(sorted(cells))
        return hood

    def candidates(self, x: float, y: float) -> list[int]:
        """Ids of all agents bucketed in the 3x3 neighborhood of (x, y).

        A superset of any radius query up to cell_size; includes the caller.
        Lists are shared per cell per rebuild: do not mutate.
        """
        cx = int(x * self._sx)
        cy = int(y * self._sy)
        if cx >= self.nx:
            cx = self.nx - 1
        if cy >= self.ny:
            cy = self.ny - 1
        key = cx * self.ny + cy
        out = self._cands.get(key)
        if out is None:
            buckets = self.buckets
            out = []
            for c in self._hood(cx, cy):
                b = buckets.get(c)
                if b:
                    out.extend(b)
            self._cands[key] = out
        return out


@dataclass(frozen=True)
class RunResult:
    """Collision statistics of one run plus the configuration that made it."""

    total_collisions: int
    collisions_per_tick: tuple[int, ...]
    per_team_collisions: tuple[int, int]  # (red, black) agent tallies
    params: SimParams
    seed: int


def setup(params: SimParams, seed: int | None = None) -> WorldState:
    """Create the initial world: red agents head 90, black head 120, all at
    min velocity, positions independently uniform (x then y per agent)."""
    n = params.n_red + params.n_black
    if n == 0:
        raise ValueError("no agents: n_red + n_black must be at least 1")
    rng = random.Random(params.seed if seed is None else seed)
    w, h = params.world_width, params.world_height
    agents = []
    for i in range(n):
        red = i < params.n_red
        x = _wrap1(rng.uniform(0.0, w), w)
        y = _wrap1(rng.uniform(0.0, h), h)
        agents.append(AgentState(
            id=i,
            team=Team.RED if red else Team.BLACK,
            x=x, y=y,
            heading=90.0 if red else 120.0,
            speed=params.min_velocity,
            random_behaviour=red,
        ))
    return WorldState(agents=agents, params=params, rng=rng)


def detect_collisions(world: WorldState, collision_radius: float,
                      grid: SpatialGrid | None = None) -> int:
    """Count this tick's collision events and update tallies and flags.

    A pair is colliding while its torus distance is strictly below the
    radius; an event fires when a pair enters that state (debounced via the
    previous tick's pair set). The configured collision rule decides how
    events feed the totals. Returns the amount added to the world total.
    """
    if collision_radius <= 0:
        raise ValueError("collision_radius must be positive")
    agents = world.agents
    p = world.params
    w, h = p.world_width, p.world_height
    now: set[tuple[int, int]] = set()
    if grid is None:
        for i, a in enumerate(agents):
            ax, ay = a.x, a.y
            for j in range(i + 1, len(agents)):
                b = agents[j]
                if torus_distance_xy(ax, ay, b.x, b.y, w, h) < collision_radius:
                    now.add((i, j))
    else:
        for i, a in enumerate(agents):
            ax, ay = a.x, a.y
            for j in grid.candidates(ax, ay):
                if j > i:
                    b = agents[j]
                    if torus_distance_xy(ax, ay, b.x, b.y, w, h) < collision_radius:
                        now.add((i, j))
    events = now - world.active_pairs
    rule = p.collision_rule
    if rule is CollisionRule.OVERLAP:
        counted, count = now, len(now)
    elif rule is CollisionRule.AGENT_ENTRY:
        counted, count = events, 2 * len(events)
    else:
        counted, count = events, len(events)
    for i, j in counted:
        agents[i].collisions += 1
        agents[j].collisions += 1
    touching = set()
    for i, j in now:
        touching.add(i)
        touching.add(j)
    for a in agents:
        a.collision_done = a.id in touching
    world.active_pairs = now
    world.total_collisions += count
    return count


def _grid_for(world: WorldState) -> SpatialGrid:
    grid = world.index
    if grid is None:
        p = world.params
        grid = SpatialGrid(p.world_width, p.world_height,
                           max(p.sonar_range, p.collision_radius))
        world.index = grid
    return grid


def tick(world: WorldState) -> WorldState:
    """Advance the world by one tick in place (also returns it)."""
    p = world.params
    agents = world.agents
    w, h = p.world_width, p.world_height
    grid = _grid_for(world)

    if p.scenario is Scenario.ALL_SOCIAL_AVS:
        for a in agents:
            if a.speed != 0.0:
                a.x, a.y = displace(a.x, a.y, a.heading, a.speed, w, h)
        grid.rebuild(agents)
        actions = [social_step(a, world, p, grid.candidates(a.x, a.y))
                   for a in agents]
        maxv = p.max_velocity
        for a, act in zip(agents, actions):
            kind = act.kind
            if kind is ActionKind.MIRROR:
                a.heading = act.new_heading
                a.speed = act.new_speed
                if not p.literal_rules:
                    a.recovering = True
            elif kind is ActionKind.ACCELERATE:
                a.speed = act.new_speed
                if act.new_speed >= maxv:
                    a.recovering = False
        world.last_actions = [act.kind for act in actions]
    else:
        rng = world.rng
        kinds = []
        for a in agents:
            act = random_walk_step(a, p, rng)
            a.x, a.y = displace(a.x, a.y, a.heading, a.speed, w, h)
            a.heading = act.mid_heading
            a.x, a.y = displace(a.x, a.y, a.heading, a.speed, w, h)
            a.heading = act.new_heading
            a.speed = act.new_speed
            a.random_behaviour = not a.random_behaviour
            kinds.append(act.kind)
        grid.rebuild(agents)
        world.last_actions = kinds

    world.collisions_per_tick.append(detect_collisions(world, p.collision_radius, grid))
    world.tick += 1
    return world


def run(params: SimParams, seed: int | None = None, trace=None) -> RunResult:
    """Set up and execute a full run; deterministic in (params, seed).

    `trace`, when given, is a writable text stream receiving one line per
    agent per tick: tick,agent,x,y,heading,speed,action.
    """
    world = setup(params, seed)
    use_seed = params.seed if seed is None else seed
    if trace is not None:
        trace.write("tick,agent,x,y,heading,speed,action\n")
    for _ in range(params.ticks):
        tick(world)
        if trace is not None:
            t = world.tick
            for a, kind in zip(world.agents, world.last_actions):
                trace.write(f"{t},{a.id},{a.x!r},{a.y!r},{a.heading!r},"
                            f"{a.speed!r},{kind.value}\n")
    red = sum(a.collisions for a in world.agents if a.team is Team.RED)
    black = sum(a.collisions for a in world.agents if a.team is Team.BLACK)
    return RunResult(
        total_collisions=world.total_collisions,
        collisions_per_tick=tuple(world.collisions_per_tick),
        per_team_collisions=(red, black),
        params=params,
        seed=use_seed,
    )
