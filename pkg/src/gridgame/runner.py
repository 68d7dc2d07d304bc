"""Episode runner and benchmark harness.

run_episode wires grid + chronic + agent + environment and iterates LARSO
cycles until the schedule is exhausted; a game over resets the environment
to the reference topology and play continues with the remaining timesteps.
Logs are newline-delimited structured records, deterministic given
(grid, chronic, agent kind, seed, config) apart from wall-clock fields.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from . import encoding
from .agents import Agent, make_agent
from .chronics import Chronic
from .environment import EnvConfig, Environment, overflow_count
from .grid_model import GridCase


@dataclass(frozen=True)
class StepRecord:
    t: int
    epoch: int
    action_summary: dict
    reward: dict  # canonical RewardBreakdown encoding
    overflow_count: int
    done: bool
    game_over: bool  # done specifically through a load cut
    wall_clock_s: float

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "epoch": self.epoch,
            "action_summary": self.action_summary,
            "reward": self.reward,
            "overflow_count": self.overflow_count,
            "done": self.done,
            "game_over": self.game_over,
            "wall_clock_s": self.wall_clock_s,
        }


@dataclass
class EpisodeLog:
    gamma: float
    steps: list[StepRecord] = field(default_factory=list)
    epochs_started: int = 0
    game_overs: int = 0

    @property
    def g0(self) -> float:
        """Discounted return over the whole run, recomputable exactly from
        the reward column."""
        return float(
            sum(
                self.gamma**k * rec.reward["total"]
                for k, rec in enumerate(self.steps)
            )
        )

    @property
    def steps_survived(self) -> int:
        """Steps before the first game over (all steps when none)."""
        for k, rec in enumerate(self.steps):
            if rec.game_over:
                return k
        return len(self.steps)

    @property
    def mean_overflows(self) -> float:
        if not self.steps:
            return 0.0
        return float(
            np.mean([rec.overflow_count for rec in self.steps])
        )

    def replay_signature(self) -> list[dict]:
        """The deterministic portion of the log (wall clock excluded)."""
        out = []
        for rec in self.steps:
            d = rec.to_dict()
            d.pop("wall_clock_s")
            out.append(d)
        return out

    def to_jsonl(self) -> str:
        return "\n".join(json.dumps(rec.to_dict()) for rec in self.steps)


def _summarize_action(action) -> dict:
    switches = np.asarray(action.line_switches)
    return {
        "disconnect": [int(i) for i in np.flatnonzero(switches == -1)],
        "reconnect": [int(i) for i in np.flatnonzero(switches == 1)],
        "configure": {
            str(i): int(np.argmax(np.asarray(c)))
            for i, c in enumerate(action.substation_choices)
            if c is not None
        },
    }


def run_episode(
    grid: GridCase,
    chronic: Chronic,
    agent: Agent,
    config: EnvConfig | None = None,
) -> EpisodeLog:
    """Play the chronic to exhaustion, restarting epochs after game overs.

    The injections fetched for a terminal step seed the next epoch, so the
    schedule neither rewinds nor skips.
    """
    config = config or EnvConfig()
    env = Environment(grid, config)
    log = EpisodeLog(gamma=config.gamma)

    injections = chronic.next()
    if injections is None:
        return log
    obs = env.reset(injections)
    log.epochs_started = 1
    epoch = 0

    t = 0
    while True:
        started = time.perf_counter()
        action = agent.act(obs, env)
        next_injections = chronic.next()
        _, obs_next, breakdown, done, info = env.step(action, next_injections)
        elapsed = time.perf_counter() - started

        game_over = bool(done and info.get("load_was_cut"))
        if game_over:
            n_over = 0
            log.game_overs += 1
        elif obs_next is not None:
            n_over = overflow_count(obs_next)
        else:
            n_over = 0
        log.steps.append(
            StepRecord(
                t=t,
                epoch=epoch,
                action_summary=_summarize_action(action),
                reward=encoding.reward_to_dict(breakdown),
                overflow_count=n_over,
                done=done,
                game_over=game_over,
                wall_clock_s=elapsed,
            )
        )
        t += 1

        if done:
            if next_injections is None or info.get("chronic_exhausted"):
                break
            obs = env.reset(next_injections)
            log.epochs_started += 1
            epoch += 1
        else:
            if obs_next is None:
                break
            obs = obs_next
    return log


@dataclass(frozen=True)
class BenchmarkRow:
    agent: str
    episodes: int
    mean_return: float
    min_return: float
    max_return: float
    mean_steps_survived: float
    mean_overflows: float

    def to_dict(self) -> dict:
        return {
            "agent": self.agent,
            "episodes": self.episodes,
            "mean_return": self.mean_return,
            "min_return": self.min_return,
            "max_return": self.max_return,
            "mean_steps_survived": self.mean_steps_survived,
            "mean_overflows": self.mean_overflows,
        }


def benchmark(
    grid: GridCase,
    chronic: Chronic,
    agent_kinds: list[str],
    seeds: list[int],
    config: EnvConfig | None = None,
) -> list[BenchmarkRow]:
    """Same-context comparison: every agent replays the same chronic with
    the same seed list."""
    rows = []
    for kind in agent_kinds:
        returns, survived, overflows = [], [], []
        for seed in seeds:
            agent = make_agent(kind, grid, seed, config=config)
            log = run_episode(grid, chronic.reload(), agent, config)
            returns.append(log.g0)
            survived.append(log.steps_survived)
            overflows.append(log.mean_overflows)
        rows.append(
            BenchmarkRow(
                agent=kind,
                episodes=len(seeds),
                mean_return=float(np.mean(returns)),
                min_return=float(np.min(returns)),
                max_return=float(np.max(returns)),
                mean_steps_survived=float(np.mean(survived)),
                mean_overflows=float(np.mean(overflows)),
            )
        )
    return rows


def format_table(rows: list[BenchmarkRow]) -> str:
    header = (
        f"{'agent':<14} {'episodes':>8} {'mean G0':>14} {'min G0':>14} "
        f"{'max G0':>14} {'steps':>8} {'overflows':>10}"
    )
    lines = [header, "-" * len(header)]
    for r in rows:
        lines.append(
            f"{r.agent:<14} {r.episodes:>8d} {r.mean_return:>14.3f} "
            f"{r.min_return:>14.3f} {r.max_return:>14.3f} "
            f"{r.mean_steps_survived:>8.2f} {r.mean_overflows:>10.3f}"
        )
    return "\n".join(lines)
