"""Tile alphabet for the platformer grid."""

from __future__ import annotations

from enum import IntEnum


class TileKind(IntEnum):
    Empty = 0
    Ground = 1
    Brick = 2
    QuestionBlock = 3
    UsedBlock = 4
    Coin = 5
    PipeBody = 6
    PipeTop = 7
    Platform = 8
    FinishPole = 9


# One printable character per tile, used by the level text format.
TILE_CHARS = {
    TileKind.Empty: ".",
    TileKind.Ground: "#",
    TileKind.Brick: "B",
    TileKind.QuestionBlock: "?",
    TileKind.UsedBlock: "U",
    TileKind.Coin: "c",
    TileKind.PipeBody: "|",
    TileKind.PipeTop: "T",
    TileKind.Platform: "-",
    TileKind.FinishPole: "F",
}

CHAR_TILES = {ch: kind for kind, ch in TILE_CHARS.items()}

# Tiles that block movement on both axes.
SOLID_TILES = frozenset(
    {
        TileKind.Ground,
        TileKind.Brick,
        TileKind.QuestionBlock,
        TileKind.UsedBlock,
        TileKind.PipeBody,
        TileKind.PipeTop,
        TileKind.Platform,
    }
)

# int-keyed views for the hot collision path (IntEnum values double as ints).
SOLID_INTS = frozenset(int(t) for t in SOLID_TILES)


def is_solid(tile: int) -> bool:
    return tile in SOLID_INTS
