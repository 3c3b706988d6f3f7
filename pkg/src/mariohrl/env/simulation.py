"""Deterministic tick-based platformer simulation.

Movement integrates position with the current velocity, then applies
gravity (so a fresh jump moves at full impulse speed on its first tick).
Collision is axis-separated against the tile grid: horizontal resolution
first, vertical second, each clamping the 1x1 bounding box to the cell
boundary it hit.  All dynamics are pure float arithmetic driven only by
the level and the action sequence; there is no runtime randomness.

Physics constants (tiles and ticks):
    max run speed 0.25, run accel 0.05, jump impulse -0.9, gravity 0.1,
    fall speed cap 0.9, walker speed 0.1, fireball speed 0.5,
    fire cooldown 10 ticks.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import IntEnum
from typing import NamedTuple

from .level import GROUND_ROW, Direction, Level, ROWS
from .tiles import SOLID_INTS, TILE_CHARS, TileKind

VIEW_ROWS = 16
VIEW_COLS = 22
VIEW_BACK = 10  # columns visible behind Mario before clamping

MAX_RUN_SPEED = 0.25
RUN_ACCEL = 0.05
JUMP_IMPULSE = -0.9
GRAVITY = 0.1
MAX_FALL_SPEED = 0.9
WALKER_SPEED = 0.1
FIREBALL_SPEED = 0.5
FIRE_COOLDOWN = 10
# A falling Mario squashes a walker only if he entered from its upper half.
STOMP_TOLERANCE = 0.5

_EPS = 1e-9


class Outcome(IntEnum):
    Running = 0
    Finished = 1
    Died = 2
    TimedOut = 3


class Action(NamedTuple):
    direction: int  # -1 left, 0 none, +1 right
    jump: bool
    fire: bool


class EntityKind(IntEnum):
    Walker = 0
    Fireball = 1


@dataclass(slots=True)
class EntityState:
    id: int
    kind: EntityKind
    x: float
    y: float
    vx: float
    vy: float
    alive: bool
    facing: Direction


@dataclass(slots=True)
class MarioState:
    x: float
    y: float
    vx: float
    vy: float
    on_ground: bool
    fire_cooldown: int
    alive: bool
    max_column_reached: int

    @property
    def column(self) -> int:
        return int(self.x + 0.5)

    @property
    def row(self) -> int:
        return int(self.y + 0.5)


@dataclass(slots=True)
class Observation:
    viewport: list[list[int]]  # VIEW_ROWS x VIEW_COLS of TileKind values
    viewport_origin_column: int
    entities: list[EntityState]
    mario: MarioState
    tick: int


@dataclass(slots=True)
class RewardConfig:
    per_tick: float = -0.05
    per_new_column: float = 1.0
    coin: float = 10.0
    monster_kill: float = 20.0
    question_block: float = 5.0
    finish: float = 100.0
    death: float = -100.0
    episode_tick_limit: int = 2000

    def __post_init__(self) -> None:
        if self.episode_tick_limit <= 0:
            raise ValueError("episode_tick_limit must be positive")


class EpisodeOver(RuntimeError):
    pass


def mario_cells(x: float, y: float) -> list[tuple[int, int]]:
    """Grid cells overlapped by a 1x1 bounding box at (x, y)."""
    r0, r1 = int(y), int(y + 1 - _EPS)
    c0, c1 = int(x), int(x + 1 - _EPS)
    cells = [(r0, c0)]
    if c1 != c0:
        cells.append((r0, c1))
    if r1 != r0:
        cells.append((r1, c0))
        if c1 != c0:
            cells.append((r1, c1))
    return cells


class MarioSim:
    """One episode-at-a-time simulator bound to a Level.

    reset() restores pristine tiles and spawns; step() advances one tick.
    Distinct instances share nothing and may run concurrently.
    """

    def __init__(self, level: Level, rewards: RewardConfig | None = None):
        self.level = level
        self.rewards = rewards if rewards is not None else RewardConfig()
        self.tiles: list[list[int]] = []
        self.entities: list[EntityState] = []
        self.mario = MarioState(0.0, 0.0, 0.0, 0.0, True, 0, True, 0)
        self.tick = 0
        self.done = True
        self.outcome = Outcome.Running
        # per-episode event counters, used by the reward accounting identity
        self.coins_collected = 0
        self.kills = 0
        self.blocks_hit = 0
        self._next_entity_id = 0

    # -- lifecycle --

    def reset(self) -> Observation:
        self.tiles = [row[:] for row in self.level.tiles]
        self.entities = []
        self._next_entity_id = 0
        for spawn in self.level.monster_spawns:
            self.entities.append(
                EntityState(
                    id=self._fresh_id(),
                    kind=EntityKind.Walker,
                    x=float(spawn.col),
                    y=float(spawn.row),
                    vx=WALKER_SPEED * int(spawn.facing),
                    vy=0.0,
                    alive=True,
                    facing=spawn.facing,
                )
            )
        self.mario = MarioState(
            x=2.0,
            y=float(GROUND_ROW - 1),
            vx=0.0,
            vy=0.0,
            on_ground=True,
            fire_cooldown=0,
            alive=True,
            max_column_reached=2,
        )
        self.tick = 0
        self.done = False
        self.outcome = Outcome.Running
        self.coins_collected = 0
        self.kills = 0
        self.blocks_hit = 0
        return self._observe()

    def _fresh_id(self) -> int:
        out = self._next_entity_id
        self._next_entity_id += 1
        return out

    # -- stepping --

    def step(self, action: Action) -> tuple[Observation, float, bool, Outcome]:
        if self.done:
            raise EpisodeOver("step() called after the episode ended")

        cfg = self.rewards
        tiles = self.tiles
        width = self.level.width
        m = self.mario
        reward = cfg.per_tick
        prev_y = m.y

        # input: horizontal accel toward direction, capped at max run speed
        d = action.direction
        if d > 0:
            m.vx = min(m.vx + RUN_ACCEL, MAX_RUN_SPEED)
        elif d < 0:
            m.vx = max(m.vx - RUN_ACCEL, -MAX_RUN_SPEED)
        elif m.vx > 0:
            m.vx = max(0.0, m.vx - RUN_ACCEL)
        elif m.vx < 0:
            m.vx = min(0.0, m.vx + RUN_ACCEL)

        if action.jump and m.on_ground:
            m.vy = JUMP_IMPULSE
            m.on_ground = False

        if m.fire_cooldown > 0:
            m.fire_cooldown -= 1
        if action.fire and m.fire_cooldown == 0:
            facing = d if d != 0 else (1 if m.vx >= 0 else -1)
            fx, fy = m.x + float(facing), m.y
            in_level = 0.0 <= fx <= width - 1 and 0 <= int(fy) < ROWS
            if in_level and tiles[int(fy)][int(fx)] not in SOLID_INTS:
                self.entities.append(
                    EntityState(
                        id=self._fresh_id(),
                        kind=EntityKind.Fireball,
                        x=fx,
                        y=fy,
                        vx=FIREBALL_SPEED * facing,
                        vy=0.0,
                        alive=True,
                        facing=Direction.Right if facing > 0 else Direction.Left,
                    )
                )
            m.fire_cooldown = FIRE_COOLDOWN

        # horizontal move + collide
        nx = m.x + m.vx
        if nx < 0.0:
            nx, m.vx = 0.0, 0.0
        elif nx > width - 1:
            nx, m.vx = float(width - 1), 0.0
        elif m.vx != 0.0:
            r0, r1 = int(m.y), int(m.y + 1 - _EPS)
            lead = int(nx + 1 - _EPS) if m.vx > 0 else int(nx)
            hit = tiles[r0][lead] in SOLID_INTS or (
                r1 != r0 and tiles[r1][lead] in SOLID_INTS
            )
            if hit:
                nx = float(lead - 1) if m.vx > 0 else float(lead + 1)
                m.vx = 0.0
        m.x = nx

        # vertical move + collide (position first, then gravity)
        if not m.on_ground:
            ny = m.y + m.vy
            c0, c1 = int(m.x), int(m.x + 1 - _EPS)
            if m.vy > 0:
                lead = int(ny + 1 - _EPS)
                if lead >= ROWS:
                    m.y = ny
                else:
                    hit = tiles[lead][c0] in SOLID_INTS or (
                        c1 != c0 and tiles[lead][c1] in SOLID_INTS
                    )
                    if hit:
                        m.y = float(lead - 1)
                        m.vy = 0.0
                        m.on_ground = True
                    else:
                        m.y = ny
            elif m.vy < 0:
                lead = int(ny)
                cols = () if lead < 0 else ((c0,) if c1 == c0 else (c0, c1))
                hit_cols = [c for c in cols if tiles[lead][c] in SOLID_INTS]
                if hit_cols:
                    m.y = float(lead + 1)
                    m.vy = 0.0
                    for c in hit_cols:
                        if tiles[lead][c] == TileKind.QuestionBlock:
                            tiles[lead][c] = int(TileKind.UsedBlock)
                            reward += cfg.question_block
                            self.blocks_hit += 1
                else:
                    m.y = ny
            if not m.on_ground:
                m.vy = min(m.vy + GRAVITY, MAX_FALL_SPEED)
        # walked off a ledge?
        if m.on_ground:
            below = int(m.y) + 1
            c0, c1 = int(m.x), int(m.x + 1 - _EPS)
            supported = below < ROWS and (
                tiles[below][c0] in SOLID_INTS
                or (c1 != c0 and tiles[below][c1] in SOLID_INTS)
            )
            if not supported:
                m.on_ground = False

        # coin pickup over the box's cells
        for r, c in mario_cells(m.x, m.y):
            if 0 <= r < ROWS and tiles[r][c] == TileKind.Coin:
                tiles[r][c] = int(TileKind.Empty)
                reward += cfg.coin
                self.coins_collected += 1

        # entity updates
        mario_died = False
        live_entities = []
        for e in self.entities:
            if not e.alive:
                continue
            if e.kind == EntityKind.Walker:
                self._move_walker(e)
            else:
                self._move_fireball(e)
                if not e.alive:
                    continue
            live_entities.append(e)
        self.entities = live_entities

        # fireball vs walker
        for f in self.entities:
            if f.kind != EntityKind.Fireball or not f.alive:
                continue
            for w in self.entities:
                if w.kind != EntityKind.Walker or not w.alive:
                    continue
                if abs(f.x - w.x) < 1.0 and abs(f.y - w.y) < 1.0:
                    f.alive = False
                    w.alive = False
                    self.kills += 1
                    reward += cfg.monster_kill
                    break

        # mario vs walker
        for w in self.entities:
            if w.kind != EntityKind.Walker or not w.alive:
                continue
            if abs(m.x - w.x) < 1.0 and abs(m.y - w.y) < 1.0:
                stomp = m.vy > 0 and prev_y + 1.0 <= w.y + STOMP_TOLERANCE
                if stomp:
                    w.alive = False
                    self.kills += 1
                    reward += cfg.monster_kill
                else:
                    mario_died = True

        if m.y >= float(GROUND_ROW):
            mario_died = True

        # progress reward
        col = m.column
        if col > m.max_column_reached:
            reward += cfg.per_new_column * (col - m.max_column_reached)
            m.max_column_reached = col

        self.tick += 1

        # terminal resolution: death beats finish; finish beats timeout
        if mario_died:
            m.alive = False
            reward += cfg.death
            self.done = True
            self.outcome = Outcome.Died
        elif col >= self.level.finish_column:
            reward += cfg.finish
            self.done = True
            self.outcome = Outcome.Finished
        elif self.tick >= cfg.episode_tick_limit:
            self.done = True
            self.outcome = Outcome.TimedOut

        return self._observe(), reward, self.done, self.outcome

    def _move_walker(self, e: EntityState) -> None:
        width = self.level.width
        tiles = self.tiles
        row = int(e.y)
        step = WALKER_SPEED * int(e.facing)
        nx = e.x + step
        if e.facing == Direction.Right:
            lead = int(nx + 1 - _EPS)
        else:
            lead = int(nx)
        blocked = (
            nx < 0.0
            or nx > width - 1
            or tiles[row][lead] in SOLID_INTS
            or (row + 1 < ROWS and tiles[row + 1][lead] not in SOLID_INTS)
        )
        if blocked:
            e.facing = Direction.Left if e.facing == Direction.Right else Direction.Right
            e.vx = WALKER_SPEED * int(e.facing)
        else:
            e.x = nx
            e.vx = step

    def _move_fireball(self, e: EntityState) -> None:
        tiles = self.tiles
        nx = e.x + e.vx
        lead = int(nx + 1 - _EPS) if e.vx > 0 else int(nx)
        if nx < 0.0 or nx > self.level.width - 1 or tiles[int(e.y)][lead] in SOLID_INTS:
            e.alive = False
        else:
            e.x = nx

    # -- observation --

    def _observe(self) -> Observation:
        width = self.level.width
        origin = self.mario.column - VIEW_BACK
        if origin < 0:
            origin = 0
        max_origin = width - VIEW_COLS
        if origin > max_origin:
            origin = max_origin
        if origin < 0:
            origin = 0  # narrower-than-viewport levels: pad with Empty
        end = origin + VIEW_COLS
        if end <= width:
            viewport = [row[origin:end] for row in self.tiles]
        else:
            pad = [int(TileKind.Empty)] * (end - width)
            viewport = [row[origin:width] + pad for row in self.tiles]
        visible = [
            replace(e)
            for e in self.entities
            if e.alive and origin <= e.x < origin + VIEW_COLS
        ]
        return Observation(
            viewport=viewport,
            viewport_origin_column=origin,
            entities=visible,
            mario=replace(self.mario),
            tick=self.tick,
        )


def render_ascii(obs: Observation) -> str:
    """16x22 text view: tiles by their format chars (Empty as blank),
    walkers as 'm', fireballs as '*', Mario as 'M' on top."""
    grid = [
        [" " if t == TileKind.Empty else TILE_CHARS[TileKind(t)] for t in row]
        for row in obs.viewport
    ]
    origin = obs.viewport_origin_column
    for e in obs.entities:
        r, c = int(e.y + 0.5), int(e.x + 0.5) - origin
        if 0 <= r < VIEW_ROWS and 0 <= c < VIEW_COLS:
            grid[r][c] = "m" if e.kind == EntityKind.Walker else "*"
    r, c = obs.mario.row, obs.mario.column - origin
    if 0 <= r < VIEW_ROWS and 0 <= c < VIEW_COLS:
        grid[r][c] = "M"
    return "\n".join("".join(row) for row in grid)
