"""Baseline policies: do-nothing, random line switching, random node
splitting, and the greedy one-line-disconnection searcher.

Randomized agents draw from numpy's PCG64 so a (seed, observation stream)
pair always reproduces the same action stream.
"""
from __future__ import annotations

import numpy as np

from .environment import Action, EnvConfig, Environment, Observation
from .errors import SimulateUnavailable
from .grid_model import GridCase, allowed_configuration_ids

AGENT_KINDS = ("do_nothing", "random_line", "random_split", "greedy_line")


class Agent:
    """Maps observations to actions. env_handle, when an agent needs it,
    only exposes read-only simulation."""

    kind = "agent"

    def __init__(self, grid: GridCase, seed: int = 0):
        self.grid = grid
        self.seed = seed
        self.rng = np.random.Generator(np.random.PCG64(seed))

    def act(self, observation: Observation, env_handle: Environment | None = None) -> Action:
        raise NotImplementedError


class DoNothingAgent(Agent):
    kind = "do_nothing"

    def act(self, observation, env_handle=None) -> Action:
        return Action.do_nothing(self.grid)


class RandomLineAgent(Agent):
    """Keeps exactly one branch of its own choosing out of service:
    reconnects the previous pick and disconnects a fresh random one."""

    kind = "random_line"

    def __init__(self, grid: GridCase, seed: int = 0):
        super().__init__(grid, seed)
        self.last_disconnected: int | None = None

    def act(self, observation, env_handle=None) -> Action:
        action = Action.do_nothing(self.grid)
        candidates = [
            i for i in range(self.grid.n_branches) if i != self.last_disconnected
        ]
        pick = int(self.rng.choice(candidates))
        if self.last_disconnected is not None:
            action = action.with_line(self.last_disconnected, 1)
        action = action.with_line(pick, -1)
        self.last_disconnected = pick
        return action


class RandomSplitAgent(Agent):
    """Re-draws one substation's configuration each step; changes persist
    until overwritten. Re-selecting the current configuration is allowed.
    Samples within the same large-substation whitelist the environment
    enforces."""

    kind = "random_split"

    def __init__(self, grid: GridCase, seed: int = 0, config: EnvConfig | None = None):
        super().__init__(grid, seed)
        config = config or EnvConfig()
        self.allowed = tuple(
            allowed_configuration_ids(
                s,
                threshold=config.large_substation_threshold,
                cap=config.large_substation_cap,
            )
            for s in grid.substations
        )

    def act(self, observation, env_handle=None) -> Action:
        sub = int(self.rng.integers(self.grid.n_substations))
        config_id = int(self.rng.choice(self.allowed[sub]))
        return Action.do_nothing(self.grid).with_configuration(
            self.grid, sub, config_id
        )


class GreedyLineAgent(Agent):
    """Simulates every single-line disconnection and applies the argmax,
    ties broken by the lowest branch index. One simulate call per branch."""

    kind = "greedy_line"

    def __init__(self, grid: GridCase, seed: int = 0, with_noop: bool = False):
        super().__init__(grid, seed)
        self.with_noop = with_noop

    def candidate_actions(self) -> list[Action]:
        actions = []
        if self.with_noop:
            actions.append(Action.do_nothing(self.grid))
        actions.extend(
            Action.do_nothing(self.grid).with_line(i, -1)
            for i in range(self.grid.n_branches)
        )
        return actions

    def act(self, observation, env_handle=None) -> Action:
        if env_handle is None:
            raise SimulateUnavailable(
                "greedy_line needs an environment handle with simulate()"
            )
        best_action = None
        best_total = -np.inf
        for action in self.candidate_actions():
            total = env_handle.simulate(action).total
            if total > best_total:
                best_total = total
                best_action = action
        return best_action


def make_agent(
    kind: str,
    grid: GridCase,
    seed: int = 0,
    config: EnvConfig | None = None,
    with_noop: bool = False,
) -> Agent:
    if kind == "do_nothing":
        return DoNothingAgent(grid, seed)
    if kind == "random_line":
        return RandomLineAgent(grid, seed)
    if kind == "random_split":
        return RandomSplitAgent(grid, seed, config=config)
    if kind == "greedy_line":
        return GreedyLineAgent(grid, seed, with_noop=with_noop)
    raise ValueError(f"unknown agent kind {kind!r}; choose from {AGENT_KINDS}")
