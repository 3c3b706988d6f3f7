"""Tabular value storage and on-policy updates for both hierarchy levels.

Numeric preferences live in plain dicts keyed by feature tuples; missing
entries read as zero.  The one-step update is SARSA,

    Q(s,a) <- Q(s,a) + alpha * (r + gamma * Q(s',a') - Q(s,a)),

with Q(s',a') = 0 at a terminal.  The FLO level uses the SMDP form over a
substate of k ticks with discounted in-substate return R = sum_i gamma^i r_i:

    Q <- Q + alpha * (R + gamma^k * Q' - Q).

Both updates are convex combinations of the old value and the target, so
values stay inside the reward bound |Q| <= Rmax / (1 - gamma).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import NamedTuple

from .env.level import Direction
from .operators import FLOInstance, FLOKind, KLO
from .perception import DistanceBucket, ObjectKind, RelationalState


@dataclass(slots=True)
class LearningParams:
    alpha: float = 0.1
    gamma: float = 0.95
    epsilon0: float = 0.2
    epsilon_decay: float = 0.999
    epsilon_min: float = 0.01

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError(f"gamma must be in [0, 1), got {self.gamma}")
        if not 0.0 <= self.epsilon0 <= 1.0:
            raise ValueError(f"epsilon0 must be in [0, 1], got {self.epsilon0}")
        if not 0.0 < self.epsilon_decay <= 1.0:
            raise ValueError(f"epsilon_decay must be in (0, 1], got {self.epsilon_decay}")
        if not 0.0 <= self.epsilon_min <= 1.0:
            raise ValueError(f"epsilon_min must be in [0, 1], got {self.epsilon_min}")


class FLOKey(NamedTuple):
    kind: FLOKind
    target_bucket: DistanceBucket  # OutOfRange for Advance
    target_direction: Direction
    mario_on_ground: bool


class KLOKey(NamedTuple):
    flo_kind: FLOKind
    dx_bucket: DistanceBucket
    dy_band: int  # -1 above (dy < -1), 0 level (|dy| <= 1), +1 below
    target_direction: Direction
    mario_on_ground: bool
    fire_ready: bool


def dy_band(dy: int) -> int:
    if dy < -1:
        return -1
    if dy > 1:
        return 1
    return 0


def flo_key(state: RelationalState, flo: FLOInstance) -> FLOKey:
    if flo.kind == FLOKind.Advance:
        return FLOKey(FLOKind.Advance, DistanceBucket.OutOfRange, Direction.Right, state.mario_on_ground)
    fact = state.facts[flo.target]
    return FLOKey(flo.kind, fact.bucket, fact.direction, state.mario_on_ground)


def klo_key(state: RelationalState, flo: FLOInstance) -> KLOKey:
    """Substate-local state key.  Advance tracks the finish pole when
    visible and otherwise collapses to a fixed placeholder."""
    fact = None
    if flo.kind == FLOKind.Advance:
        for f in state.facts:
            if f.kind == ObjectKind.Finish:
                fact = f
                break
    else:
        fact = state.by_identity.get(flo.target_key)
    if fact is None:
        return KLOKey(
            flo.kind,
            DistanceBucket.OutOfRange,
            0,
            Direction.Right,
            state.mario_on_ground,
            state.mario_fire_ready,
        )
    return KLOKey(
        flo.kind,
        fact.bucket,
        dy_band(fact.dy),
        fact.direction,
        state.mario_on_ground,
        state.mario_fire_ready,
    )


class QStore:
    """Two tabular preference maps: FLO level and KLO level."""

    def __init__(self) -> None:
        self.flo_values: dict[FLOKey, float] = {}
        self.klo_values: dict[tuple[KLOKey, KLO], float] = {}

    def flo_value(self, key: FLOKey) -> float:
        return self.flo_values.get(key, 0.0)

    def klo_value(self, key: KLOKey, klo: KLO) -> float:
        return self.klo_values.get((key, klo), 0.0)


def q_value(table: dict, key) -> float:
    """Stored preference, or exactly 0 for an absent key."""
    return table.get(key, 0.0)


def select(candidates: list, values: list[float], epsilon: float, rng: random.Random) -> int:
    """Epsilon-greedy index selection with smallest-index tie-breaking.

    Candidates must arrive in a deterministic order (propose_flos /
    legal_klos define the canonical one), which makes ties reproducible.
    """
    n = len(candidates)
    if n == 0:
        raise ValueError("select() needs at least one candidate")
    if len(values) != n:
        raise ValueError("values must align with candidates")
    if epsilon > 0.0 and rng.random() < epsilon:
        return rng.randrange(n)
    best = 0
    best_v = values[0]
    for i in range(1, n):
        if values[i] > best_v:
            best = i
            best_v = values[i]
    return best


def sarsa_update(
    table: dict,
    key,
    reward: float,
    next_key,
    alpha: float,
    gamma: float,
) -> float:
    """One-step on-policy update; next_key None means terminal (Q' = 0).

    next_key is the (state, action) key actually selected next.
    """
    if not math.isfinite(reward):
        raise ValueError(f"non-finite reward {reward}")
    q = table.get(key, 0.0)
    q_next = 0.0 if next_key is None else table.get(next_key, 0.0)
    target = reward + gamma * q_next
    updated = q + alpha * (target - q)
    assert abs(updated) <= max(abs(q), abs(target)) + 1e-9
    table[key] = updated
    return updated


def smdp_flo_update(
    table: dict,
    key,
    accumulated: tuple[float, int],
    next_key,
    alpha: float,
    gamma: float,
) -> float:
    """FLO-level update over a closed substate.

    accumulated = (R, k): discounted in-substate reward sum and duration in
    ticks; the bootstrap is discounted by gamma**k.  With k = 1 this is
    exactly sarsa_update with r = R.
    """
    r_sum, k = accumulated
    if k < 1:
        raise ValueError(f"substate duration must be >= 1 tick, got {k}")
    if not math.isfinite(r_sum):
        raise ValueError(f"non-finite accumulated reward {r_sum}")
    q = table.get(key, 0.0)
    q_next = 0.0 if next_key is None else table.get(next_key, 0.0)
    target = r_sum + (gamma ** k) * q_next
    updated = q + alpha * (target - q)
    assert abs(updated) <= max(abs(q), abs(target)) + 1e-9
    table[key] = updated
    return updated


# --- checkpoint format ------------------------------------------------------
#
#   FLO <kind> <bucket> <dir> <on_ground> <value>
#   KLO <flo_kind> <dxb> <dyb> <dir> <on_ground> <fire> <klo> <value>
#
# Values carry 9 significant digits; lines are sorted so dumps are stable.

_DY_NAMES = {-1: "Above", 0: "Level", 1: "Below"}
_DY_VALUES = {name: band for band, name in _DY_NAMES.items()}


def _flag(b: bool) -> str:
    return "1" if b else "0"


def dump_qstore(store: QStore) -> str:
    lines = []
    for key in sorted(store.flo_values):
        v = store.flo_values[key]
        lines.append(
            f"FLO {key.kind.name} {key.target_bucket.name} "
            f"{key.target_direction.name} {_flag(key.mario_on_ground)} {v:.9g}"
        )
    for key, klo in sorted(store.klo_values):
        v = store.klo_values[(key, klo)]
        lines.append(
            f"KLO {key.flo_kind.name} {key.dx_bucket.name} {_DY_NAMES[key.dy_band]} "
            f"{key.target_direction.name} {_flag(key.mario_on_ground)} "
            f"{_flag(key.fire_ready)} {klo.name} {v:.9g}"
        )
    return "\n".join(lines) + ("\n" if lines else "")


def load_qstore(text: str) -> QStore:
    store = QStore()
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split()
        try:
            if parts[0] == "FLO":
                key = FLOKey(
                    FLOKind[parts[1]],
                    DistanceBucket[parts[2]],
                    Direction[parts[3]],
                    parts[4] == "1",
                )
                store.flo_values[key] = float(parts[5])
            elif parts[0] == "KLO":
                key = KLOKey(
                    FLOKind[parts[1]],
                    DistanceBucket[parts[2]],
                    _DY_VALUES[parts[3]],
                    Direction[parts[4]],
                    parts[5] == "1",
                    parts[6] == "1",
                )
                store.klo_values[(key, KLO[parts[7]])] = float(parts[8])
            else:
                raise KeyError(parts[0])
        except (KeyError, IndexError, ValueError) as exc:
            raise ValueError(f"bad checkpoint line {lineno}: {line!r}") from exc
    return store


def save_qstore(store: QStore, path) -> None:
    with open(path, "w") as fh:
        fh.write(dump_qstore(store))


def load_qstore_file(path) -> QStore:
    with open(path) as fh:
        return load_qstore(fh.read())
