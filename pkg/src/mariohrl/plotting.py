"""Figure rendering for training curves and agent comparisons.

Matplotlib is imported lazily with the Agg backend so headless runs and
library users that never plot stay light.
"""

from __future__ import annotations

from .harness import AgentComparison, LearningCurve, ROLLING_WINDOW


def _pyplot():
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    return plt


def plot_learning_curve(curve: LearningCurve, out_path: str, title: str = "Training reward") -> None:
    plt = _pyplot()
    rewards = [r.total_reward for r in curve.results]
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.plot(rewards, color="tab:blue", alpha=0.25, lw=0.6, label="episode reward")
    ax.plot(curve.rolling_means, color="tab:blue", lw=1.8, label=f"rolling mean ({ROLLING_WINDOW})")
    ax.set_xlabel("episode")
    ax.set_ylabel("reward")
    ax.set_title(title)
    ax.legend(loc="lower right")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)


def plot_comparison(
    curves: dict[str, list[LearningCurve]], rows: list[AgentComparison], out_path: str
) -> None:
    """Left: rolling-mean curves per agent (one faint line per run seed).
    Right: mean reward per agent with a std whisker across runs."""
    import statistics

    plt = _pyplot()
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4.5))
    colors = {}
    cycle = iter(plt.rcParams["axes.prop_cycle"].by_key()["color"])
    for agent, agent_curves in curves.items():
        colors[agent] = next(cycle)
        for i, curve in enumerate(agent_curves):
            ax1.plot(
                curve.rolling_means,
                color=colors[agent],
                alpha=0.8 if i == 0 else 0.35,
                lw=1.4 if i == 0 else 0.9,
                label=agent if i == 0 else None,
            )
    ax1.set_xlabel("episode")
    ax1.set_ylabel(f"rolling mean reward ({ROLLING_WINDOW})")
    ax1.set_title("Learning curves")
    ax1.legend(loc="lower right")
    ax1.grid(alpha=0.3)

    by_agent: dict[str, list[float]] = {}
    for row in rows:
        by_agent.setdefault(row.agent, []).append(row.mean_reward)
    names = list(by_agent)
    means = [statistics.fmean(by_agent[n]) for n in names]
    stds = [statistics.pstdev(by_agent[n]) if len(by_agent[n]) > 1 else 0.0 for n in names]
    ax2.bar(names, means, yerr=stds, capsize=4, color=[colors.get(n, "gray") for n in names])
    ax2.set_ylabel("mean episode reward")
    ax2.set_title("Mean reward per agent")
    ax2.grid(alpha=0.3, axis="y")
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
