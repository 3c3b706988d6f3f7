"""Deterministic seeded platformer: levels, physics, episodes."""

from .level import (
    Direction,
    GROUND_ROW,
    Level,
    LevelError,
    MIN_WIDTH,
    MonsterSpawn,
    ROWS,
    generate_level,
    level_from_text,
    level_to_text,
    level_violations,
    load_level,
    pit_spans,
    save_level,
)
from .simulation import (
    Action,
    EntityKind,
    EntityState,
    EpisodeOver,
    MarioSim,
    MarioState,
    Observation,
    Outcome,
    RewardConfig,
    VIEW_COLS,
    VIEW_ROWS,
    mario_cells,
    render_ascii,
)
from .tiles import CHAR_TILES, SOLID_TILES, TILE_CHARS, TileKind, is_solid

__all__ = [
    "Action",
    "CHAR_TILES",
    "Direction",
    "EntityKind",
    "EntityState",
    "EpisodeOver",
    "GROUND_ROW",
    "Level",
    "LevelError",
    "MIN_WIDTH",
    "MarioSim",
    "MarioState",
    "MonsterSpawn",
    "Observation",
    "Outcome",
    "ROWS",
    "RewardConfig",
    "SOLID_TILES",
    "TILE_CHARS",
    "TileKind",
    "VIEW_COLS",
    "VIEW_ROWS",
    "generate_level",
    "is_solid",
    "level_from_text",
    "level_to_text",
    "level_violations",
    "load_level",
    "mario_cells",
    "pit_spans",
    "render_ascii",
    "save_level",
]
