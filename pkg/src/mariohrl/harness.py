"""Experiment runner: training loops, seed schedules, CSV curves, reports.

Episode i of a run uses the level seed `level_seed(run_seed, i)` (or a
fixed seed when configured), so re-running any experiment reproduces the
exact level sequence.  Curves are written as CSV with the schema

    episode,reward,ticks,outcome,coins,kills,blocks,max_column,rolling_mean_100

where rewards use Python float repr so files are byte-reproducible and
rolling means recompute exactly from the raw rows.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field, replace

from .agents import EpisodeResult, HRLAgent, RandomAgent, ScriptedAgent
from .env.level import Level, generate_level
from .env.simulation import MarioSim, Outcome, RewardConfig
from .learning import LearningParams
from .operators import KLO, KLO_ACTIONS
from .perception import perceive

CSV_HEADER = "episode,reward,ticks,outcome,coins,kills,blocks,max_column,rolling_mean_100"
ROLLING_WINDOW = 100

AGENT_NAMES = ("hrl", "scripted", "random")


def level_seed(run_seed: int, episode_index: int) -> int:
    """Per-episode level seed; pure function of (run_seed, episode index)."""
    return (1000003 * (run_seed + 1) + 7919 * episode_index + 12345) % (2**31 - 1)


@dataclass
class ExperimentConfig:
    level_type: int = 0
    difficulty: int = 0
    episodes: int = 2000
    agent: str = "hrl"
    run_seed: int = 1
    fixed_level_seed: int | None = None  # None: fresh level per episode
    params: LearningParams = field(default_factory=LearningParams)
    rewards: RewardConfig = field(default_factory=RewardConfig)
    out_path: str | None = None
    checkpoint_path: str | None = None
    trajectory_path: str | None = None

    def __post_init__(self) -> None:
        if self.episodes < 1:
            raise ValueError("episodes must be >= 1")
        if self.agent not in AGENT_NAMES:
            raise ValueError(f"unknown agent {self.agent!r}; expected one of {AGENT_NAMES}")

    def level_for_episode(self, episode_index: int) -> Level:
        seed = (
            self.fixed_level_seed
            if self.fixed_level_seed is not None
            else level_seed(self.run_seed, episode_index)
        )
        return generate_level(self.level_type, self.difficulty, seed)


def make_agent(config: ExperimentConfig):
    if config.agent == "hrl":
        return HRLAgent(replace(config.params), seed=config.run_seed)
    if config.agent == "scripted":
        return ScriptedAgent()
    return RandomAgent(seed=config.run_seed)


def run_episode(sim: MarioSim, agent, trajectory: list[str] | None = None) -> EpisodeResult:
    """One full episode: observe -> perceive -> act -> step until done."""
    obs = sim.reset()
    agent.begin_episode()
    uses_perception = getattr(agent, "uses_perception", True)
    total = 0.0
    reward_since = 0.0
    while True:
        state = perceive(obs) if uses_perception else None
        klo = agent.act(obs, state, reward_since)
        obs, reward, done, outcome = sim.step(KLO_ACTIONS[klo])
        total += reward
        if trajectory is not None:
            flo = getattr(agent, "current_flo", None)
            flo_name = flo.kind.name if flo is not None else "-"
            trajectory.append(
                f"{sim.tick} flo={flo_name} klo={klo.name} r={reward!r} x={obs.mario.column}"
            )
        if done:
            agent.end_episode(reward)
            break
        reward_since = reward
    return EpisodeResult(
        total_reward=total,
        ticks=sim.tick,
        outcome=outcome,
        coins=sim.coins_collected,
        kills=sim.kills,
        blocks=sim.blocks_hit,
        max_column=sim.mario.max_column_reached,
        flo_selections=dict(agent.episode_flo_selections),
    )


@dataclass
class LearningCurve:
    results: list[EpisodeResult]
    rolling_means: list[float]

    def to_csv(self) -> str:
        lines = [CSV_HEADER]
        for i, (res, rm) in enumerate(zip(self.results, self.rolling_means)):
            lines.append(
                f"{i},{res.total_reward!r},{res.ticks},{res.outcome.name},"
                f"{res.coins},{res.kills},{res.blocks},{res.max_column},{rm!r}"
            )
        return "\n".join(lines) + "\n"

    def summary(self) -> str:
        rewards = [r.total_reward for r in self.results]
        n = len(rewards)
        head = statistics.fmean(rewards[: min(100, n)])
        tail = statistics.fmean(rewards[-min(100, n):])
        finish_rate = sum(r.outcome == Outcome.Finished for r in self.results) / n
        return (
            f"episodes={n} mean_first_100={head:.2f} mean_last_100={tail:.2f} "
            f"finish_rate={finish_rate:.3f}"
        )


def rolling_mean(rewards: list[float], window: int = ROLLING_WINDOW) -> list[float]:
    out = []
    acc = 0.0
    for i, r in enumerate(rewards):
        acc += r
        if i >= window:
            acc -= rewards[i - window]
        out.append(acc / min(i + 1, window))
    return out


def run_experiment(config: ExperimentConfig, agent=None, quiet: bool = False) -> LearningCurve:
    """Train/run one agent for config.episodes episodes.

    Agent state persists across episodes (the learner keeps its tables and
    decays epsilon per episode).  Writes the CSV, optional Q checkpoint,
    and optional final-episode trajectory log (plus the matching level
    dump at <trajectory>.level).
    """
    out_fh = None
    if config.out_path is not None:
        out_fh = open(config.out_path, "w")  # fail before any episode runs
    if agent is None:
        agent = make_agent(config)
    results: list[EpisodeResult] = []
    rewards: list[float] = []
    means: list[float] = []
    acc = 0.0
    last_level = None
    last_trajectory: list[str] | None = None
    try:
        if out_fh is not None:
            out_fh.write(CSV_HEADER + "\n")
        for i in range(config.episodes):
            level = config.level_for_episode(i)
            sim = MarioSim(level, replace(config.rewards))
            want_traj = config.trajectory_path is not None and i == config.episodes - 1
            trajectory = [] if want_traj else None
            res = run_episode(sim, agent, trajectory)
            results.append(res)
            rewards.append(res.total_reward)
            acc += res.total_reward
            if i >= ROLLING_WINDOW:
                acc -= rewards[i - ROLLING_WINDOW]
            rm = acc / min(i + 1, ROLLING_WINDOW)
            means.append(rm)
            if out_fh is not None:
                out_fh.write(
                    f"{i},{res.total_reward!r},{res.ticks},{res.outcome.name},"
                    f"{res.coins},{res.kills},{res.blocks},{res.max_column},{rm!r}\n"
                )
            if want_traj:
                last_level = level
                last_trajectory = trajectory
    finally:
        if out_fh is not None:
            out_fh.close()
    curve = LearningCurve(results=results, rolling_means=means)
    if config.checkpoint_path is not None and isinstance(agent, HRLAgent):
        from .learning import save_qstore

        save_qstore(agent.store, config.checkpoint_path)
    if last_trajectory is not None:
        from .env.level import save_level

        with open(config.trajectory_path, "w") as fh:
            fh.write("\n".join(last_trajectory) + "\n")
        save_level(last_level, str(config.trajectory_path) + ".level")
    if not quiet:
        print(f"[{config.agent} run_seed={config.run_seed}] {curve.summary()}")
    return curve


def evaluate_agent(
    config: ExperimentConfig, agent, episodes: int, eval_seed_offset: int = 10_000_000
) -> list[EpisodeResult]:
    """Greedy evaluation on a seed schedule disjoint from training."""
    was_eval = getattr(agent, "evaluation", None)
    if isinstance(agent, HRLAgent):
        agent.evaluation = True
    results = []
    for i in range(episodes):
        seed = (
            config.fixed_level_seed
            if config.fixed_level_seed is not None
            else level_seed(config.run_seed, eval_seed_offset + i)
        )
        level = generate_level(config.level_type, config.difficulty, seed)
        sim = MarioSim(level, replace(config.rewards))
        results.append(run_episode(sim, agent))
    if isinstance(agent, HRLAgent):
        agent.evaluation = was_eval
    return results


@dataclass
class AgentComparison:
    agent: str
    run_seed: int
    episodes: int
    mean_reward: float
    std_reward: float
    finish_rate: float


def compare_agents(
    base_config: ExperimentConfig,
    agents: list[str],
    runs: int = 3,
    quiet: bool = True,
) -> list[AgentComparison]:
    """Run each agent over the same level-seed schedules (one per run seed).

    Reporting tool: ordering between agents is measured, never asserted.
    """
    if len(agents) < 2:
        raise ValueError("compare_agents needs at least two agent variants")
    rows = []
    for name in agents:
        for r in range(runs):
            cfg = replace(
                base_config,
                agent=name,
                run_seed=base_config.run_seed + r,
                out_path=None,
                checkpoint_path=None,
                trajectory_path=None,
            )
            curve = run_experiment(cfg, quiet=quiet)
            rewards = [res.total_reward for res in curve.results]
            rows.append(
                AgentComparison(
                    agent=name,
                    run_seed=cfg.run_seed,
                    episodes=cfg.episodes,
                    mean_reward=statistics.fmean(rewards),
                    std_reward=statistics.pstdev(rewards) if len(rewards) > 1 else 0.0,
                    finish_rate=sum(res.outcome == Outcome.Finished for res in curve.results)
                    / len(curve.results),
                )
            )
    return rows


def comparison_csv(rows: list[AgentComparison]) -> str:
    lines = ["agent,run_seed,episodes,mean_reward,std_reward,finish_rate"]
    for row in rows:
        lines.append(
            f"{row.agent},{row.run_seed},{row.episodes},"
            f"{row.mean_reward!r},{row.std_reward!r},{row.finish_rate!r}"
        )
    return "\n".join(lines) + "\n"


def comparison_table(rows: list[AgentComparison]) -> str:
    """Aggregate mean +/- std of reward and finish rate per agent."""
    by_agent: dict[str, list[AgentComparison]] = {}
    for row in rows:
        by_agent.setdefault(row.agent, []).append(row)
    lines = [f"{'agent':<10} {'runs':>4} {'mean_reward':>12} {'std':>8} {'finish_rate':>12}"]
    for agent, group in by_agent.items():
        means = [g.mean_reward for g in group]
        mean = statistics.fmean(means)
        std = statistics.pstdev(means) if len(means) > 1 else 0.0
        fr = statistics.fmean(g.finish_rate for g in group)
        lines.append(f"{agent:<10} {len(group):>4} {mean:>12.2f} {std:>8.2f} {fr:>12.3f}")
    return "\n".join(lines)


# --- trajectory replay ------------------------------------------------------


def parse_trajectory(text: str) -> list[tuple[int, str, KLO, float, int]]:
    steps = []
    for line in text.splitlines():
        if not line.strip():
            continue
        tick_s, flo_s, klo_s, r_s, x_s = line.split()
        steps.append(
            (
                int(tick_s),
                flo_s.split("=", 1)[1],
                KLO[klo_s.split("=", 1)[1]],
                float(r_s.split("=", 1)[1]),
                int(x_s.split("=", 1)[1]),
            )
        )
    return steps


def replay_trajectory(
    level: Level, steps: list[tuple[int, str, KLO, float, int]], rewards: RewardConfig | None = None
) -> list[str]:
    """Re-execute a logged trajectory; returns mismatch descriptions."""
    sim = MarioSim(level, rewards if rewards is not None else RewardConfig())
    sim.reset()
    problems = []
    for tick, _flo, klo, logged_r, logged_x in steps:
        if sim.done:
            problems.append(f"tick {tick}: episode already over in replay")
            break
        obs, reward, done, _ = sim.step(KLO_ACTIONS[klo])
        if sim.tick != tick:
            problems.append(f"tick {tick}: replay tick counter is {sim.tick}")
        if reward != logged_r:
            problems.append(f"tick {tick}: reward {reward!r} != logged {logged_r!r}")
        if obs.mario.column != logged_x:
            problems.append(f"tick {tick}: column {obs.mario.column} != logged {logged_x}")
        if problems:
            break
    else:
        if not sim.done:
            problems.append("trajectory ended before the episode did")
    return problems
