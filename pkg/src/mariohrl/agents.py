"""Executable policies: the hierarchical learner and two baselines.

The hierarchical agent runs a substate machine.  Selecting a FLO opens a
substate; inside it the agent picks KLOs from the FLO's legal set, updating
KLO-level preferences one tick at a time (SARSA).  When the substate closes
the whole discounted in-substate return credits the FLO choice (SMDP
update), and a new FLO is selected in the same tick.  KLO-level updates
chain on-policy across substate boundaries (tables stay partitioned by FLO
kind); only episode end is terminal for both levels.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .env.simulation import Observation, Outcome
from .learning import (
    FLOKey,
    KLOKey,
    LearningParams,
    QStore,
    flo_key,
    klo_key,
    sarsa_update,
    select,
    smdp_flo_update,
)
from .operators import (
    FLOInstance,
    FLOKind,
    KLO,
    TerminationStatus,
    flo_terminated,
    legal_klos,
    propose_flos,
)
from .perception import ObjectKind, RelationalState

ALL_KLOS = tuple(KLO)


@dataclass(slots=True)
class EpisodeResult:
    total_reward: float
    ticks: int
    outcome: Outcome
    coins: int
    kills: int
    blocks: int
    max_column: int
    flo_selections: dict[FLOKind, int] = field(default_factory=dict)


class AgentError(RuntimeError):
    pass


class HRLAgent:
    """Two-level epsilon-greedy SARSA learner over the operator hierarchy."""

    uses_perception = True

    def __init__(self, params: LearningParams | None = None, seed: int = 0):
        self.params = params if params is not None else LearningParams()
        self.store = QStore()
        self.rng = random.Random(f"hrl-agent:{seed}")
        self.epsilon = self.params.epsilon0
        self.evaluation = False  # greedy, frozen tables, no epsilon decay
        self.trace_selections = False
        self.selection_trace: list[tuple[frozenset, FLOKind]] = []

        self._episode_open = False
        self._executing = False
        self._flo: FLOInstance | None = None
        self._flo_key: FLOKey | None = None
        self._ticks_in_substate = 0
        self._acc_reward = 0.0
        self._gamma_pow = 1.0
        self._last_klo: tuple[KLOKey, KLO] | None = None

        # per-episode bookkeeping (update-accounting invariants, stats)
        self.episode_flo_selections: dict[FLOKind, int] = {}
        self.actions_taken = 0
        self.klo_updates = 0
        self.flo_updates = 0
        self.last_termination: TerminationStatus | None = None

    # -- episode lifecycle --

    def begin_episode(self) -> None:
        self._episode_open = True
        self._executing = False
        self._flo = None
        self._last_klo = None
        self.episode_flo_selections = {}
        self.actions_taken = 0
        self.klo_updates = 0
        self.flo_updates = 0

    def act(self, obs: Observation, state: RelationalState, reward_since_last: float) -> KLO:
        if not self._episode_open:
            raise AgentError("act() outside an open episode")
        eps = 0.0 if self.evaluation else self.epsilon

        if self._executing:
            self._acc_reward += self._gamma_pow * reward_since_last
            self._gamma_pow *= self.params.gamma
            self._ticks_in_substate += 1
            status = flo_terminated(self._flo, state, self._ticks_in_substate, Outcome.Running)
            self.last_termination = status
            if status.active:
                key = klo_key(state, self._flo)
                legal = legal_klos(self._flo.kind)
                values = [self.store.klo_values.get((key, k), 0.0) for k in legal]
                klo = legal[select(legal, values, eps, self.rng)]
                if not self.evaluation:
                    sarsa_update(
                        self.store.klo_values,
                        self._last_klo,
                        reward_since_last,
                        (key, klo),
                        self.params.alpha,
                        self.params.gamma,
                    )
                    self.klo_updates += 1
                self._last_klo = (key, klo)
                self.actions_taken += 1
                return klo
            # substate closed: select the next FLO and its first KLO, then
            # update the previous KLO on-policy against that first KLO (the
            # KLO chain is only terminal at episode end)
            next_flo, next_key, first_key, first_klo = self._select_flo(state, eps)
            if not self.evaluation:
                sarsa_update(
                    self.store.klo_values,
                    self._last_klo,
                    reward_since_last,
                    (first_key, first_klo),
                    self.params.alpha,
                    self.params.gamma,
                )
                self.klo_updates += 1
            if not self.evaluation:
                smdp_flo_update(
                    self.store.flo_values,
                    self._flo_key,
                    (self._acc_reward, self._ticks_in_substate),
                    next_key,
                    self.params.alpha,
                    self.params.gamma,
                )
                self.flo_updates += 1
            self._enter_substate(next_flo, next_key, first_key, first_klo)
            self.actions_taken += 1
            return first_klo

        # start of episode: open the first substate
        flo, key, first_key, first_klo = self._select_flo(state, eps)
        self._enter_substate(flo, key, first_key, first_klo)
        self.actions_taken += 1
        return first_klo

    def end_episode(self, terminal_reward: float) -> None:
        if not self._episode_open:
            raise AgentError("end_episode() without an open episode")
        if self._executing:
            self._acc_reward += self._gamma_pow * terminal_reward
            self._ticks_in_substate += 1
            if not self.evaluation:
                sarsa_update(
                    self.store.klo_values,
                    self._last_klo,
                    terminal_reward,
                    None,
                    self.params.alpha,
                    self.params.gamma,
                )
                self.klo_updates += 1
                smdp_flo_update(
                    self.store.flo_values,
                    self._flo_key,
                    (self._acc_reward, self._ticks_in_substate),
                    None,
                    self.params.alpha,
                    self.params.gamma,
                )
                self.flo_updates += 1
            self._executing = False
            self._flo = None
            self._last_klo = None
        if not self.evaluation:
            self.epsilon = max(self.params.epsilon_min, self.epsilon * self.params.epsilon_decay)
        self._episode_open = False

    # -- internals --

    def _select_flo(self, state: RelationalState, eps: float):
        candidates = propose_flos(state)
        keys = [flo_key(state, f) for f in candidates]
        values = [self.store.flo_values.get(k, 0.0) for k in keys]
        i = select(candidates, values, eps, self.rng)
        flo, key = candidates[i], keys[i]
        self.episode_flo_selections[flo.kind] = self.episode_flo_selections.get(flo.kind, 0) + 1
        if self.trace_selections:
            proposed = frozenset(c.kind for c in candidates)
            self.selection_trace.append((proposed, flo.kind))
        first_key = klo_key(state, flo)
        legal = legal_klos(flo.kind)
        klo_values = [self.store.klo_values.get((first_key, k), 0.0) for k in legal]
        first_klo = legal[select(legal, klo_values, eps, self.rng)]
        return flo, key, first_key, first_klo

    def _enter_substate(
        self, flo: FLOInstance, key: FLOKey, first_key: KLOKey, first_klo: KLO
    ) -> None:
        self._executing = True
        self._flo = flo
        self._flo_key = key
        self._ticks_in_substate = 0
        self._acc_reward = 0.0
        self._gamma_pow = 1.0
        self._last_klo = (first_key, first_klo)

    @property
    def current_flo(self) -> FLOInstance | None:
        return self._flo if self._executing else None


class ScriptedAgent:
    """Fixed-priority baseline: jump pits and walls, shoot or hop monsters,
    bounce for overhead loot, otherwise run right."""

    uses_perception = True

    def begin_episode(self) -> None:
        pass

    def act(self, obs: Observation, state: RelationalState, reward_since_last: float) -> KLO:
        return scripted_act(obs, state)

    def end_episode(self, terminal_reward: float) -> None:
        pass

    @property
    def episode_flo_selections(self) -> dict:
        return {}


def scripted_act(obs: Observation, state: RelationalState) -> KLO:
    """Priority rules over the relational state (pure function)."""
    monster_ahead = None
    for f in state.facts:
        if f.kind == ObjectKind.Pit and f.is_ahead:
            return KLO.JumpRight
        if (
            f.kind == ObjectKind.Monster
            and f.isthreat
            and f.dx > 0
            and (monster_ahead is None or f.dx < monster_ahead.dx)
        ):
            monster_ahead = f
    if monster_ahead is not None:
        if monster_ahead.dx <= 2:
            return KLO.JumpRight
        if state.mario_fire_ready:
            return KLO.Fire
    if _wall_ahead(obs):
        return KLO.JumpRight
    for f in state.facts:
        if (
            f.kind in (ObjectKind.CoinObj, ObjectKind.QuestionBlockObj)
            and f.isreachable
            and abs(f.dx) <= 1
        ):
            return KLO.Jump
    return KLO.Right


def _wall_ahead(obs: Observation) -> bool:
    """Solid tile at head or foot height within two columns ahead."""
    from .env.tiles import SOLID_INTS

    row, col = obs.mario.row, obs.mario.column
    origin = obs.viewport_origin_column
    for dc in (1, 2):
        c = col + dc - origin
        if not 0 <= c < len(obs.viewport[0]):
            continue
        for r in (row, row - 1):
            if 0 <= r < len(obs.viewport) and obs.viewport[r][c] in SOLID_INTS:
                return True
    return False


class RandomAgent:
    """Uniform-random floor baseline over the full KLO set."""

    uses_perception = False

    def __init__(self, seed: int = 0):
        self.rng = random.Random(f"random-agent:{seed}")

    def begin_episode(self) -> None:
        pass

    def act(self, obs: Observation, state: RelationalState | None, reward_since_last: float) -> KLO:
        return random_act(ALL_KLOS, self.rng)

    def end_episode(self, terminal_reward: float) -> None:
        pass

    @property
    def episode_flo_selections(self) -> dict:
        return {}


def random_act(legal: tuple[KLO, ...], rng: random.Random) -> KLO:
    if not legal:
        raise ValueError("random_act() needs a non-empty KLO set")
    return legal[rng.randrange(len(legal))]
