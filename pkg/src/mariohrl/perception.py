"""Relational perception: objects and qualitative facts from an observation.

The raw viewport is reduced to a set of objects (monsters, coin runs,
question blocks, pipes, pits, platforms, the finish pole) and one fact per
object describing where it sits relative to Mario: signed tile offsets, a
qualitative distance bucket, and kind-specific attributes (isthreat,
isreachable, is_ahead).  Everything here is a pure function of the
observation, so repeated calls are bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

from .env.level import Direction, GROUND_ROW
from .env.simulation import EntityKind, MarioState, Observation, VIEW_COLS, VIEW_ROWS
from .env.tiles import TileKind


class ObjectKind(IntEnum):
    Monster = 0
    CoinObj = 1
    QuestionBlockObj = 2
    Pipe = 3
    Pit = 4
    PlatformObj = 5
    Finish = 6


class DistanceBucket(IntEnum):
    Adjacent = 0  # |dx| <= 1
    Near = 1      # |dx| <= 3
    Mid = 2       # |dx| <= 6
    Far = 3       # |dx| <= 10
    OutOfRange = 4


def bucket_distance(dx: int) -> DistanceBucket:
    a = abs(dx)
    if a <= 1:
        return DistanceBucket.Adjacent
    if a <= 3:
        return DistanceBucket.Near
    if a <= 6:
        return DistanceBucket.Mid
    if a <= 10:
        return DistanceBucket.Far
    return DistanceBucket.OutOfRange


@dataclass(slots=True)
class PerceptionConfig:
    """Qualitative attribute thresholds (tiles, relative to Mario)."""

    threat_dx: int = 4
    threat_dy: int = 3
    reach_dx: int = 3
    reach_dy_up: int = -4   # coins/blocks up to 4 rows above
    reach_dy_down: int = 1  # or 1 row below
    ahead_dx: int = 4


DEFAULT_PERCEPTION = PerceptionConfig()


@dataclass(slots=True)
class GameObject:
    id: int
    kind: ObjectKind
    col_span: tuple[int, int]  # inclusive absolute columns
    anchor_row: int
    entity_ref: int | None = None  # Monster only

    @property
    def identity(self):
        """Cross-tick identity: entity id for monsters, position for tiles."""
        if self.kind == ObjectKind.Monster:
            return (int(self.kind), self.entity_ref)
        return (int(self.kind), self.col_span, self.anchor_row)


@dataclass(slots=True)
class RelationalFact:
    object_id: int
    kind: ObjectKind
    dx: int  # nearest span edge minus Mario's column; 0 when inside the span
    dy: int  # object row minus Mario's row; negative = above
    bucket: DistanceBucket
    direction: Direction
    isthreat: bool = False
    isreachable: bool = False
    is_ahead: bool = False


@dataclass(slots=True)
class RelationalState:
    facts: tuple[RelationalFact, ...]  # sorted by object id, one per object
    mario_on_ground: bool
    mario_fire_ready: bool
    tick: int
    # plumbing for cross-tick target tracking:
    mario_column: int = 0
    viewport_origin: int = 0
    objects: tuple[GameObject, ...] = ()
    by_identity: dict = field(default_factory=dict)

    def fact_for(self, object_id: int) -> RelationalFact | None:
        if 0 <= object_id < len(self.facts):
            return self.facts[object_id]
        return None


_EMPTY_ROW = [int(TileKind.Empty)] * VIEW_COLS
_COIN = int(TileKind.Coin)
_QUESTION = int(TileKind.QuestionBlock)
_PLATFORM = int(TileKind.Platform)
_PIPE_BODY = int(TileKind.PipeBody)
_PIPE_TOP = int(TileKind.PipeTop)
_POLE = int(TileKind.FinishPole)
_GROUND = int(TileKind.Ground)


def extract_objects(obs: Observation) -> list[GameObject]:
    """Objects in the viewport, ids assigned by (kind, left column, row).

    Tile objects are maximal groups: horizontal runs for coins and
    platforms, connected components for pipes, single tiles for question
    blocks, bottom-row gaps in the ground for pits.  Each alive walker
    maps to one Monster (fireballs are Mario's own projectiles, not
    monsters).
    """
    origin = obs.viewport_origin_column
    raw: list[tuple] = []  # (kind, left, row, right, entity_ref)

    for e in obs.entities:
        if e.alive and e.kind == EntityKind.Walker:
            c = int(e.x + 0.5)
            r = int(e.y + 0.5)
            raw.append((ObjectKind.Monster, c, r, c, e.id))

    pipe_cells: list[tuple[int, int]] = []
    finish_cells: list[tuple[int, int]] = []
    for r, row in enumerate(obs.viewport):
        if row == _EMPTY_ROW:
            continue
        c = 0
        while c < VIEW_COLS:
            t = row[c]
            if t == _COIN:
                lo = c
                while c < VIEW_COLS and row[c] == _COIN:
                    c += 1
                raw.append((ObjectKind.CoinObj, origin + lo, r, origin + c - 1, None))
                continue
            if t == _PLATFORM:
                lo = c
                while c < VIEW_COLS and row[c] == _PLATFORM:
                    c += 1
                raw.append((ObjectKind.PlatformObj, origin + lo, r, origin + c - 1, None))
                continue
            if t == _QUESTION:
                raw.append((ObjectKind.QuestionBlockObj, origin + c, r, origin + c, None))
            elif t == _PIPE_BODY or t == _PIPE_TOP:
                pipe_cells.append((r, origin + c))
            elif t == _POLE:
                finish_cells.append((r, origin + c))
            c += 1

    # pits: bottom-row runs lacking ground
    bottom = obs.viewport[GROUND_ROW]
    c = 0
    while c < VIEW_COLS:
        if bottom[c] != _GROUND:
            lo = c
            while c < VIEW_COLS and bottom[c] != _GROUND:
                c += 1
            raw.append((ObjectKind.Pit, origin + lo, GROUND_ROW, origin + c - 1, None))
        else:
            c += 1

    for lo, row_top, hi in _pipe_components(pipe_cells):
        raw.append((ObjectKind.Pipe, lo, row_top, hi, None))

    if finish_cells:
        col = finish_cells[0][1]
        top = min(r for r, _ in finish_cells)
        raw.append((ObjectKind.Finish, col, top, col, None))

    raw.sort(key=lambda o: (int(o[0]), o[1], o[2], o[4] if o[4] is not None else -1))
    return [
        GameObject(id=i, kind=k, col_span=(lo, hi), anchor_row=r, entity_ref=ref)
        for i, (k, lo, r, hi, ref) in enumerate(raw)
    ]


def _pipe_components(cells: list[tuple[int, int]]) -> list[tuple[int, int, int]]:
    """(left_col, top_row, right_col) per 4-connected pipe tile group."""
    if not cells:
        return []
    todo = set(cells)
    comps = []
    while todo:
        seed = min(todo)
        todo.discard(seed)
        stack = [seed]
        rows = [seed[0]]
        cols = [seed[1]]
        while stack:
            r, c = stack.pop()
            for nb in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
                if nb in todo:
                    todo.discard(nb)
                    stack.append(nb)
                    rows.append(nb[0])
                    cols.append(nb[1])
        comps.append((min(cols), min(rows), max(cols)))
    return comps


def elaborate(
    objects: list[GameObject],
    mario: MarioState,
    tick: int,
    config: PerceptionConfig = DEFAULT_PERCEPTION,
    viewport_origin: int | None = None,
) -> RelationalState:
    """Attach one qualitative fact to every object.

    isthreat (monsters):      |dx| <= threat_dx and |dy| <= threat_dy
    isreachable (coins/blocks): |dx| <= reach_dx and reach_dy_up <= dy <= reach_dy_down
    is_ahead (pits/pipes):    0 < dx <= ahead_dx;  finish: any 0 < dx
    """
    mcol = mario.column
    mrow = mario.row
    if viewport_origin is None:
        viewport_origin = mcol - 10
    facts = []
    by_identity = {}
    for obj in objects:
        lo, hi = obj.col_span
        if mcol < lo:
            dx = lo - mcol
        elif mcol > hi:
            dx = hi - mcol
        else:
            dx = 0
        dy = obj.anchor_row - mrow
        kind = obj.kind
        fact = RelationalFact(
            object_id=obj.id,
            kind=kind,
            dx=dx,
            dy=dy,
            bucket=bucket_distance(dx),
            direction=Direction.Left if dx < 0 else Direction.Right,
        )
        if kind == ObjectKind.Monster:
            fact.isthreat = abs(dx) <= config.threat_dx and abs(dy) <= config.threat_dy
        elif kind == ObjectKind.CoinObj or kind == ObjectKind.QuestionBlockObj:
            fact.isreachable = (
                abs(dx) <= config.reach_dx
                and config.reach_dy_up <= dy <= config.reach_dy_down
            )
        elif kind == ObjectKind.Pit or kind == ObjectKind.Pipe:
            fact.is_ahead = 0 < dx <= config.ahead_dx
        elif kind == ObjectKind.Finish:
            fact.is_ahead = dx > 0
        facts.append(fact)
        by_identity[obj.identity] = fact
    return RelationalState(
        facts=tuple(facts),
        mario_on_ground=mario.on_ground,
        mario_fire_ready=mario.fire_cooldown == 0,
        tick=tick,
        mario_column=mcol,
        viewport_origin=viewport_origin,
        objects=tuple(objects),
        by_identity=by_identity,
    )


def perceive(obs: Observation, config: PerceptionConfig = DEFAULT_PERCEPTION) -> RelationalState:
    """extract_objects + elaborate on one observation."""
    return elaborate(
        extract_objects(obs),
        obs.mario,
        obs.tick,
        config,
        viewport_origin=obs.viewport_origin_column,
    )


def dump_state(state: RelationalState) -> str:
    """One line per fact, sorted by id; stable for golden tests."""
    lines = []
    for f in state.facts:
        if f.kind == ObjectKind.Monster:
            attrs = f"isthreat={'yes' if f.isthreat else 'no'}"
        elif f.kind in (ObjectKind.CoinObj, ObjectKind.QuestionBlockObj):
            attrs = f"isreachable={'yes' if f.isreachable else 'no'}"
        elif f.kind in (ObjectKind.Pit, ObjectKind.Pipe, ObjectKind.Finish):
            attrs = f"is_ahead={'yes' if f.is_ahead else 'no'}"
        else:
            attrs = "-"
        lines.append(
            f"{f.kind.name} id={f.object_id} dx={f.dx} dy={f.dy} "
            f"bucket={f.bucket.name} dir={f.direction.name} attrs={attrs}"
        )
    return "\n".join(lines)
