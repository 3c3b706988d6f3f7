"""Hierarchical relational RL on a deterministic tile platformer.

Layers:
    env         seeded level generation, physics, episode lifecycle
    perception  objects + qualitative relational facts from observations
    operators   KLO primitives, FLO subtasks, substate termination
    learning    tabular preferences, epsilon-greedy SARSA / SMDP updates
    agents      hierarchical learner, scripted and random baselines
    harness     experiments, learning-curve CSV, comparisons, replay
"""

from .env import (
    Action,
    Direction,
    Level,
    MarioSim,
    Observation,
    Outcome,
    RewardConfig,
    TileKind,
    generate_level,
    load_level,
    render_ascii,
    save_level,
)
from .agents import EpisodeResult, HRLAgent, RandomAgent, ScriptedAgent
from .harness import ExperimentConfig, LearningCurve, run_episode, run_experiment
from .learning import LearningParams, QStore
from .operators import FLOInstance, FLOKind, KLO
from .perception import (
    DistanceBucket,
    GameObject,
    RelationalFact,
    RelationalState,
    bucket_distance,
    elaborate,
    extract_objects,
    perceive,
)

__version__ = "0.1.0"

__all__ = [
    "Action",
    "Direction",
    "DistanceBucket",
    "EpisodeResult",
    "ExperimentConfig",
    "FLOInstance",
    "FLOKind",
    "GameObject",
    "HRLAgent",
    "KLO",
    "LearningCurve",
    "LearningParams",
    "Level",
    "MarioSim",
    "Observation",
    "Outcome",
    "QStore",
    "RandomAgent",
    "RelationalFact",
    "RelationalState",
    "RewardConfig",
    "ScriptedAgent",
    "TileKind",
    "bucket_distance",
    "elaborate",
    "extract_objects",
    "generate_level",
    "load_level",
    "perceive",
    "render_ascii",
    "run_episode",
    "run_experiment",
    "save_level",
    "__version__",
]
