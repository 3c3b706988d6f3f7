"""Command line entry point: train, compare, and replay subcommands.

Every flag can also come from a flat key=value config file (--config);
explicit flags override file values, which override built-in defaults.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .env.level import load_level
from .env.simulation import RewardConfig
from .harness import (
    AGENT_NAMES,
    ExperimentConfig,
    compare_agents,
    comparison_csv,
    comparison_table,
    evaluate_agent,
    make_agent,
    parse_trajectory,
    replay_trajectory,
    run_experiment,
)
from .learning import LearningParams

_TRAIN_DEFAULTS = {
    "level_type": 0,
    "difficulty": 0,
    "episodes": 2000,
    "agent": "hrl",
    "alpha": 0.1,
    "gamma": 0.95,
    "epsilon": 0.2,
    "epsilon_decay": 0.999,
    "epsilon_min": 0.01,
    "run_seed": 1,
    "out": "curve.csv",
    "fixed_level": None,
    "checkpoint": None,
    "log_trajectory": None,
    "eval_episodes": 0,
    "plot": None,
    "tick_limit": 2000,
}

_COMPARE_DEFAULTS = {
    "level_type": 0,
    "difficulty": 0,
    "episodes": 200,
    "agents": "hrl,scripted,random",
    "runs": 3,
    "run_seed": 1,
    "out": "comparison",
    "alpha": 0.1,
    "gamma": 0.95,
    "epsilon": 0.2,
    "epsilon_decay": 0.999,
    "epsilon_min": 0.01,
    "fixed_level": None,
    "tick_limit": 2000,
    "plot": True,
}


def read_config_file(path: str) -> dict:
    """Flat key=value lines; '#' starts a comment, blank lines ignored."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SystemExit(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _coerce(key: str, value, defaults: dict):
    if value is None or not isinstance(value, str):
        return value
    ref = defaults.get(key)
    if isinstance(ref, bool):
        return value.lower() in ("1", "true", "yes", "on")
    if isinstance(ref, int) and not isinstance(ref, bool):
        return int(value)
    if isinstance(ref, float):
        return float(value)
    if key in ("fixed_level",):
        return int(value)
    if key in ("eval_episodes", "tick_limit", "runs"):
        return int(value)
    return value


def merge_options(args: argparse.Namespace, defaults: dict) -> dict:
    """defaults < config file < explicit flags."""
    merged = dict(defaults)
    config_path = getattr(args, "config", None)
    if config_path:
        for key, value in read_config_file(config_path).items():
            if key not in defaults:
                raise SystemExit(f"unknown config key {key!r} in {config_path}")
            merged[key] = _coerce(key, value, defaults)
    for key, value in vars(args).items():
        if key in defaults and value is not None:
            merged[key] = value
    return merged


def _add_common_train_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key=value config file; flags override it")
    p.add_argument("--level-type", type=int, dest="level_type")
    p.add_argument("--difficulty", type=int)
    p.add_argument("--episodes", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--epsilon", type=float, help="initial exploration rate")
    p.add_argument("--epsilon-decay", type=float, dest="epsilon_decay")
    p.add_argument("--epsilon-min", type=float, dest="epsilon_min")
    p.add_argument("--run-seed", type=int, dest="run_seed")
    p.add_argument("--fixed-level", type=int, dest="fixed_level", metavar="SEED",
                   help="reuse one level seed every episode instead of fresh levels")
    p.add_argument("--tick-limit", type=int, dest="tick_limit")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mariohrl",
        description="Train and evaluate hierarchical platformer agents.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="train one agent and write its learning curve")
    _add_common_train_flags(train)
    train.add_argument("--agent", choices=AGENT_NAMES)
    train.add_argument("--out", help="learning-curve CSV path")
    train.add_argument("--checkpoint", help="write the learned Q tables here")
    train.add_argument("--log-trajectory", dest="log_trajectory", metavar="PATH",
                       help="log the final episode (level dump lands at PATH.level)")
    train.add_argument("--eval-episodes", type=int, dest="eval_episodes",
                       help="greedy evaluation episodes after training")
    train.add_argument("--plot", metavar="PNG", help="render the learning curve figure")

    compare = sub.add_parser("compare", help="run several agents on shared level schedules")
    _add_common_train_flags(compare)
    compare.add_argument("--agents", help="comma-separated agent names")
    compare.add_argument("--runs", type=int, help="run seeds per agent")
    compare.add_argument("--out", help="output prefix for <out>.csv and <out>.png")
    compare.add_argument("--no-plot", dest="plot", action="store_false", default=None)

    replay = sub.add_parser("replay", help="verify a logged trajectory re-executes identically")
    replay.add_argument("--level-file", required=True)
    replay.add_argument("--trajectory", required=True)

    return parser


def _experiment_config(opts: dict, agent: str) -> ExperimentConfig:
    return ExperimentConfig(
        level_type=opts["level_type"],
        difficulty=opts["difficulty"],
        episodes=opts["episodes"],
        agent=agent,
        run_seed=opts["run_seed"],
        fixed_level_seed=opts["fixed_level"],
        params=LearningParams(
            alpha=opts["alpha"],
            gamma=opts["gamma"],
            epsilon0=opts["epsilon"],
            epsilon_decay=opts["epsilon_decay"],
            epsilon_min=opts["epsilon_min"],
        ),
        rewards=RewardConfig(episode_tick_limit=opts["tick_limit"]),
    )


def cmd_train(args: argparse.Namespace) -> int:
    opts = merge_options(args, _TRAIN_DEFAULTS)
    config = _experiment_config(opts, opts["agent"])
    config = replace(
        config,
        out_path=opts["out"],
        checkpoint_path=opts["checkpoint"],
        trajectory_path=opts["log_trajectory"],
    )
    print(
        f"train agent={config.agent} level_type={config.level_type} "
        f"difficulty={config.difficulty} episodes={config.episodes} "
        f"run_seed={config.run_seed} alpha={config.params.alpha} "
        f"gamma={config.params.gamma} epsilon0={config.params.epsilon0} "
        f"epsilon_decay={config.params.epsilon_decay} epsilon_min={config.params.epsilon_min}"
    )
    agent = make_agent(config)
    curve = run_experiment(config, agent=agent)
    print(f"curve written to {config.out_path}")
    if opts["plot"]:
        from .plotting import plot_learning_curve

        plot_learning_curve(curve, opts["plot"], title=f"{config.agent} training reward")
        print(f"figure written to {opts['plot']}")
    if opts["eval_episodes"] > 0:
        results = evaluate_agent(config, agent, opts["eval_episodes"])
        import statistics

        mean = statistics.fmean(r.total_reward for r in results)
        fr = sum(r.outcome.name == "Finished" for r in results) / len(results)
        print(f"eval episodes={len(results)} mean_reward={mean:.2f} finish_rate={fr:.3f}")
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    opts = merge_options(args, _COMPARE_DEFAULTS)
    agents = [a.strip() for a in opts["agents"].split(",") if a.strip()]
    base = _experiment_config(opts, agents[0])
    print(
        f"compare agents={','.join(agents)} runs={opts['runs']} episodes={base.episodes} "
        f"difficulty={base.difficulty} run_seed_base={base.run_seed} "
        f"alpha={base.params.alpha} gamma={base.params.gamma} epsilon0={base.params.epsilon0}"
    )
    curves: dict[str, list] = {name: [] for name in agents}
    rows = []
    import statistics

    from .harness import AgentComparison
    from .env.simulation import Outcome

    for name in agents:
        for r in range(opts["runs"]):
            cfg = replace(base, agent=name, run_seed=base.run_seed + r)
            curve = run_experiment(cfg, quiet=True)
            curves[name].append(curve)
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
    csv_path = f"{opts['out']}.csv"
    with open(csv_path, "w") as fh:
        fh.write(comparison_csv(rows))
    print(comparison_table(rows))
    print(f"comparison written to {csv_path}")
    if opts["plot"]:
        from .plotting import plot_comparison

        png_path = f"{opts['out']}.png"
        plot_comparison(curves, rows, png_path)
        print(f"figure written to {png_path}")
    return 0


def cmd_replay(args: argparse.Namespace) -> int:
    level = load_level(args.level_file)
    with open(args.trajectory) as fh:
        steps = parse_trajectory(fh.read())
    problems = replay_trajectory(level, steps)
    if problems:
        for p in problems:
            print(f"MISMATCH {p}", file=sys.stderr)
        return 1
    print(f"replay OK ({len(steps)} ticks re-executed identically)")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "train":
        return cmd_train(args)
    if args.command == "compare":
        return cmd_compare(args)
    return cmd_replay(args)


if __name__ == "__main__":
    sys.exit(main())
