"""Level data, seeded generation, and the plain-text dump format.

A level is a 16-row grid of tiles plus monster spawn points and the column
of the finish pole.  Generation is fully driven by (level_type, difficulty,
seed): the same triple always yields a byte-identical level.

Text format (round-trips byte-exactly):

    w=<width> finish=<col> seed=<seed>
    <16 rows of width tile characters>
    monster <kind> <col> <row> <facing>      (one line per spawn)
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import IntEnum
from typing import NamedTuple

from .tiles import CHAR_TILES, TILE_CHARS, TileKind

ROWS = 16
GROUND_ROW = 15
MIN_WIDTH = 30


class Direction(IntEnum):
    Left = -1
    Right = 1


class MonsterSpawn(NamedTuple):
    kind: str  # only "walker" for now
    col: int
    row: int
    facing: Direction


@dataclass
class Level:
    width: int
    tiles: list[list[int]]  # ROWS x width of TileKind values
    monster_spawns: list[MonsterSpawn]
    finish_column: int
    seed: int
    level_type: int = 0
    difficulty: int = 0

    def tile(self, row: int, col: int) -> int:
        return self.tiles[row][col]


class LevelError(ValueError):
    pass


def pit_spans(level: Level) -> list[tuple[int, int]]:
    """Maximal runs of bottom-row columns with no Ground, as (lo, hi) inclusive."""
    spans = []
    bottom = level.tiles[GROUND_ROW]
    c = 0
    while c < level.width:
        if bottom[c] != TileKind.Ground:
            lo = c
            while c < level.width and bottom[c] != TileKind.Ground:
                c += 1
            spans.append((lo, c - 1))
        else:
            c += 1
    return spans


def level_violations(level: Level) -> list[str]:
    """All violated Level invariants, empty when the level is well formed."""
    bad = []
    if level.width < MIN_WIDTH:
        bad.append(f"width {level.width} < {MIN_WIDTH}")
    if len(level.tiles) != ROWS:
        bad.append(f"{len(level.tiles)} rows, expected {ROWS}")
    for r, row in enumerate(level.tiles):
        if len(row) != level.width:
            bad.append(f"row {r} has {len(row)} cols")
    if not 0 <= level.finish_column < level.width:
        bad.append(f"finish_column {level.finish_column} out of range")
    pole_cols = {
        c
        for row in level.tiles
        for c, t in enumerate(row)
        if t == TileKind.FinishPole
    }
    if pole_cols != {level.finish_column}:
        bad.append(f"finish pole columns {sorted(pole_cols)} != {{{level.finish_column}}}")
    for lo, hi in pit_spans(level):
        if lo == 0 or hi == level.width - 1:
            bad.append(f"pit [{lo},{hi}] touches level edge")
        else:
            if level.tiles[GROUND_ROW][lo - 1] != TileKind.Ground:
                bad.append(f"pit [{lo},{hi}] lacks left ground flank")
            if level.tiles[GROUND_ROW][hi + 1] != TileKind.Ground:
                bad.append(f"pit [{lo},{hi}] lacks right ground flank")
    for s in level.monster_spawns:
        if not (0 <= s.col < level.width and 0 <= s.row < ROWS):
            bad.append(f"spawn {s} out of bounds")
    return bad


# --- generation -----------------------------------------------------------

# Feature counts as a function of difficulty; widths scale so the start and
# finish zones stay clear.  Density (count / width) grows with difficulty.
_START_CLEAR = 10  # columns kept hazard-free at the level start
_FINISH_CLEAR = 5  # columns kept hazard-free before the pole


def _feature_targets(width: int, difficulty: int) -> dict[str, int]:
    d = difficulty
    return {
        "pits": 2 + min(d, 4),
        "pipes": 1 + d // 2,
        "monsters": min(2, width // 20) + d,
        "coin_runs": 3,
        "qblocks": 2,
        "platforms": 1 + d // 3,
    }


def generate_level(level_type: int, difficulty: int, seed: int) -> Level:
    """Generate a deterministic level for the overground type.

    Only level_type 0 exists; difficulty scales pit, pipe, and monster
    density.  At difficulty 0 every pit is at most 2 tiles wide and the
    monster count stays at or below width/20.
    """
    if level_type != 0:
        raise LevelError(f"unsupported level_type {level_type}; only 0 (overground) exists")
    if difficulty < 0:
        raise LevelError(f"difficulty must be >= 0, got {difficulty}")

    rng = random.Random(f"level:{level_type}:{difficulty}:{seed}")
    width = 56 + rng.randrange(17) + 4 * min(difficulty, 4)
    tiles = [[int(TileKind.Empty)] * width for _ in range(ROWS)]
    tiles[GROUND_ROW] = [int(TileKind.Ground)] * width

    finish_column = width - 3
    for r in range(8, GROUND_ROW):
        tiles[r][finish_column] = int(TileKind.FinishPole)

    targets = _feature_targets(width, difficulty)

    # Every feature claims a column interval (with margin) from a shared pool
    # so that hazards never collide and same-kind objects never stack.
    claimed: list[tuple[int, int]] = []
    usable_lo = _START_CLEAR
    usable_hi = finish_column - _FINISH_CLEAR  # exclusive

    def claim(lo: int, hi: int) -> bool:
        if lo < usable_lo or hi >= usable_hi:
            return False
        for a, b in claimed:
            if lo <= b + 1 and hi >= a - 1:
                return False
        claimed.append((lo, hi))
        return True

    def place(span_width: int, tries: int = 40) -> int | None:
        for _ in range(tries):
            lo = usable_lo + rng.randrange(max(1, usable_hi - usable_lo - span_width))
            if claim(lo, lo + span_width - 1):
                return lo
        return None

    monster_spawns: list[MonsterSpawn] = []

    # Pits first: they shape the ground and dominate difficulty.  The first
    # pit is always 2 wide (too wide to straddle, so flat running dies in
    # it); later pits vary.
    max_pit = min(2 + difficulty, 4) if difficulty > 0 else 2
    for i in range(targets["pits"]):
        w = 2 if i == 0 else 1 + rng.randrange(max_pit)
        lo = place(w + 2)  # keep a ground flank claimed on both sides
        if lo is None:
            continue
        for c in range(lo + 1, lo + 1 + w):
            tiles[GROUND_ROW][c] = int(TileKind.Empty)

    # Pipes: single-column, sitting on ground; jumpable at every difficulty.
    pipe_h = 2 if difficulty < 2 else 3
    for _ in range(targets["pipes"]):
        lo = place(3)
        if lo is None:
            continue
        c = lo + 1
        tiles[GROUND_ROW - 1][c] = int(TileKind.PipeBody)
        if pipe_h == 3:
            tiles[GROUND_ROW - 2][c] = int(TileKind.PipeBody)
        tiles[GROUND_ROW - pipe_h][c] = int(TileKind.PipeTop)

    # Raised platforms, bare: a coin on top would look reachable whenever a
    # jumping Mario rises past it, yet the platform blocks every grab from
    # below, baiting unwinnable subtasks.
    for _ in range(targets["platforms"]):
        w = 3 + rng.randrange(3)
        lo = place(w)
        if lo is None:
            continue
        row = 10 + rng.randrange(3)
        for c in range(lo, lo + w):
            tiles[row][c] = int(TileKind.Platform)

    # Floating coin runs.
    for _ in range(targets["coin_runs"]):
        w = 1 + rng.randrange(3)
        lo = place(w)
        if lo is None:
            continue
        row = 12 + rng.randrange(2)
        for c in range(lo, lo + w):
            tiles[row][c] = int(TileKind.Coin)

    # Question blocks at head-bump height.
    for _ in range(targets["qblocks"]):
        lo = place(1)
        if lo is None:
            continue
        tiles[11][lo] = int(TileKind.QuestionBlock)

    # Walkers patrol flat ground.
    for _ in range(targets["monsters"]):
        lo = place(2)
        if lo is None:
            continue
        facing = Direction.Left if rng.random() < 0.7 else Direction.Right
        monster_spawns.append(MonsterSpawn("walker", lo, GROUND_ROW - 1, facing))

    level = Level(
        width=width,
        tiles=tiles,
        monster_spawns=monster_spawns,
        finish_column=finish_column,
        seed=seed,
        level_type=level_type,
        difficulty=difficulty,
    )
    assert not level_violations(level)
    return level


# --- text format ----------------------------------------------------------


def level_to_text(level: Level) -> str:
    lines = [f"w={level.width} finish={level.finish_column} seed={level.seed}"]
    for row in level.tiles:
        lines.append("".join(TILE_CHARS[TileKind(t)] for t in row))
    for s in level.monster_spawns:
        facing = "left" if s.facing == Direction.Left else "right"
        lines.append(f"monster {s.kind} {s.col} {s.row} {facing}")
    return "\n".join(lines) + "\n"


def level_from_text(text: str) -> Level:
    lines = text.splitlines()
    if not lines:
        raise LevelError("empty level text")
    header = dict(part.split("=", 1) for part in lines[0].split())
    try:
        width = int(header["w"])
        finish = int(header["finish"])
        seed = int(header["seed"])
    except (KeyError, ValueError) as exc:
        raise LevelError(f"bad level header {lines[0]!r}") from exc
    if len(lines) < 1 + ROWS:
        raise LevelError(f"expected {ROWS} tile rows, got {len(lines) - 1}")
    tiles = []
    for r in range(ROWS):
        row_text = lines[1 + r]
        if len(row_text) != width:
            raise LevelError(f"row {r} has {len(row_text)} chars, expected {width}")
        try:
            tiles.append([int(CHAR_TILES[ch]) for ch in row_text])
        except KeyError as exc:
            raise LevelError(f"unknown tile char in row {r}") from exc
    spawns = []
    for line in lines[1 + ROWS:]:
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 5 or parts[0] != "monster":
            raise LevelError(f"bad monster line {line!r}")
        facing = Direction.Left if parts[4] == "left" else Direction.Right
        spawns.append(MonsterSpawn(parts[1], int(parts[2]), int(parts[3]), facing))
    return Level(
        width=width,
        tiles=tiles,
        monster_spawns=spawns,
        finish_column=finish,
        seed=seed,
    )


def save_level(level: Level, path) -> None:
    with open(path, "w") as fh:
        fh.write(level_to_text(level))


def load_level(path) -> Level:
    with open(path) as fh:
        return level_from_text(fh.read())
