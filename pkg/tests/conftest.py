"""Shared helpers: hand-built levels for physics and perception tests."""

from __future__ import annotations

import pytest

from mariohrl.env import Direction, GROUND_ROW, Level, MonsterSpawn, ROWS, TileKind


def flat_level(
    width: int = 40,
    finish_column: int | None = None,
    monsters: list[MonsterSpawn] | None = None,
    tiles: dict[tuple[int, int], TileKind] | None = None,
    pits: list[tuple[int, int]] | None = None,
    seed: int = 0,
) -> Level:
    """Flat ground with explicit tile overrides, pits (lo, hi), and spawns."""
    if finish_column is None:
        finish_column = width - 3
    grid = [[int(TileKind.Empty)] * width for _ in range(ROWS)]
    grid[GROUND_ROW] = [int(TileKind.Ground)] * width
    for r in range(8, GROUND_ROW):
        grid[r][finish_column] = int(TileKind.FinishPole)
    for lo, hi in pits or []:
        for c in range(lo, hi + 1):
            grid[GROUND_ROW][c] = int(TileKind.Empty)
    for (r, c), kind in (tiles or {}).items():
        grid[r][c] = int(kind)
    return Level(
        width=width,
        tiles=grid,
        monster_spawns=list(monsters or []),
        finish_column=finish_column,
        seed=seed,
    )


@pytest.fixture
def plain_level():
    return flat_level()


def walker(col: int, facing: Direction = Direction.Left) -> MonsterSpawn:
    return MonsterSpawn("walker", col, GROUND_ROW - 1, facing)
