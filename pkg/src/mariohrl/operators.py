"""Two-level operator hierarchy: primitive KLOs and object-directed FLOs.

A KLO is one controller input.  A FLO is an object-directed subtask that
opens a substate; it is proposed from the qualitative attributes of the
relational state, runs a restricted set of KLOs, and terminates when its
object is discharged (or lost, or the substate times out).  Advance is the
always-available fallback so the proposal set is never empty.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

from .env.level import Direction
from .env.simulation import Action, Outcome, VIEW_COLS
from .perception import ObjectKind, RelationalState

SUBSTATE_TIMEOUT = 50  # ticks before any substate is abandoned
ADVANCE_COMMITMENT = 20  # ticks Advance runs before yielding on its own


class KLO(IntEnum):
    NoOp = 0
    Left = 1
    Right = 2
    Jump = 3
    JumpLeft = 4
    JumpRight = 5
    Fire = 6


KLO_ACTIONS: dict[KLO, Action] = {
    KLO.NoOp: Action(0, False, False),
    KLO.Left: Action(-1, False, False),
    KLO.Right: Action(1, False, False),
    KLO.Jump: Action(0, True, False),
    KLO.JumpLeft: Action(-1, True, False),
    KLO.JumpRight: Action(1, True, False),
    KLO.Fire: Action(0, False, True),
}


class FLOKind(IntEnum):
    TackleMonster = 0
    GrabCoin = 1
    HitQuestionBlock = 2
    CrossPit = 3
    Advance = 4


@dataclass(slots=True)
class FLOInstance:
    kind: FLOKind
    target: int | None  # GameObject id in the proposing state; None for Advance
    proposed_at_tick: int
    # cross-tick plumbing (per-observation ids are not persistent):
    target_key: tuple | None = None
    target_span: tuple[int, int] | None = None


class FailureReason(IntEnum):
    TargetLost = 0
    Timeout = 1
    MarioDied = 2
    EpisodeEnded = 3


@dataclass(frozen=True, slots=True)
class TerminationStatus:
    active: bool
    success: bool = False
    reason: FailureReason | None = None

    @property
    def failed(self) -> bool:
        return not self.active and not self.success


ACTIVE = TerminationStatus(active=True)
SUCCESS = TerminationStatus(active=False, success=True)


def _failure(reason: FailureReason) -> TerminationStatus:
    return TerminationStatus(active=False, reason=reason)


_PROPOSAL_KIND = {
    ObjectKind.Monster: FLOKind.TackleMonster,
    ObjectKind.CoinObj: FLOKind.GrabCoin,
    ObjectKind.QuestionBlockObj: FLOKind.HitQuestionBlock,
    ObjectKind.Pit: FLOKind.CrossPit,
}


def _proposable(fact) -> bool:
    k = fact.kind
    if k == ObjectKind.Monster:
        return fact.isthreat
    if k == ObjectKind.CoinObj or k == ObjectKind.QuestionBlockObj:
        return fact.isreachable
    if k == ObjectKind.Pit:
        return fact.is_ahead
    return False


def propose_flos(state: RelationalState) -> list[FLOInstance]:
    """All legally applicable FLOs, ordered by (kind, target id).

    One instance per qualifying object plus exactly one Advance.  Selection
    among them is the learner's job, never hard-coded here.
    """
    proposals = []
    for fact, obj in zip(state.facts, state.objects):
        if _proposable(fact):
            proposals.append(
                FLOInstance(
                    kind=_PROPOSAL_KIND[fact.kind],
                    target=fact.object_id,
                    proposed_at_tick=state.tick,
                    target_key=obj.identity,
                    target_span=obj.col_span,
                )
            )
    proposals.sort(key=lambda p: (int(p.kind), p.target))
    proposals.append(
        FLOInstance(kind=FLOKind.Advance, target=None, proposed_at_tick=state.tick)
    )
    return proposals


def flo_terminated(
    flo: FLOInstance,
    state: RelationalState,
    ticks_in_substate: int,
    episode_outcome: Outcome = Outcome.Running,
) -> TerminationStatus:
    """Pure substate-exit rule.

    Success when the proposing condition is discharged; TargetLost when the
    target left the viewport undischarged; Timeout at the substate bound;
    MarioDied/EpisodeEnded mirror the episode outcome; otherwise Active.
    """
    if flo.kind == FLOKind.Advance:
        if any(_proposable(f) for f in state.facts):
            return SUCCESS  # another FLO is proposable; yield to re-selection
        if ticks_in_substate >= ADVANCE_COMMITMENT:
            return SUCCESS
    else:
        fact = state.by_identity.get(flo.target_key)
        lo, hi = flo.target_span
        if flo.kind == FLOKind.TackleMonster:
            if fact is None:  # dead, or gone from the scene
                return SUCCESS
        elif flo.kind == FLOKind.CrossPit:
            if state.mario_column > hi:
                return SUCCESS
            if fact is None:
                return _failure(FailureReason.TargetLost)
        else:  # GrabCoin / HitQuestionBlock
            if fact is None:
                origin = state.viewport_origin
                in_view = lo >= origin and hi < origin + VIEW_COLS
                if in_view:
                    return SUCCESS  # collected / consumed in place
                return _failure(FailureReason.TargetLost)
    if ticks_in_substate >= SUBSTATE_TIMEOUT:
        return _failure(FailureReason.Timeout)
    if episode_outcome == Outcome.Died:
        return _failure(FailureReason.MarioDied)
    if episode_outcome in (Outcome.Finished, Outcome.TimedOut):
        return _failure(FailureReason.EpisodeEnded)
    return ACTIVE


_LEGAL_KLOS: dict[FLOKind, tuple[KLO, ...]] = {
    FLOKind.TackleMonster: (
        KLO.Left,
        KLO.Right,
        KLO.Jump,
        KLO.JumpLeft,
        KLO.JumpRight,
        KLO.Fire,
        KLO.NoOp,
    ),
    FLOKind.GrabCoin: (KLO.Left, KLO.Right, KLO.Jump, KLO.JumpLeft, KLO.JumpRight, KLO.NoOp),
    FLOKind.HitQuestionBlock: (
        KLO.Left,
        KLO.Right,
        KLO.Jump,
        KLO.JumpLeft,
        KLO.JumpRight,
        KLO.NoOp,
    ),
    FLOKind.CrossPit: (KLO.Right, KLO.JumpRight, KLO.NoOp),
    FLOKind.Advance: (KLO.Right, KLO.JumpRight, KLO.NoOp),
}


def legal_klos(flo: FLOInstance | FLOKind) -> tuple[KLO, ...]:
    """Restricted KLO set per FLO; never empty.  Order is the canonical
    candidate order used for deterministic tie-breaking."""
    kind = flo if isinstance(flo, FLOKind) else flo.kind
    return _LEGAL_KLOS[kind]
