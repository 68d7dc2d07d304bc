"""The game environment: a partially observable MDP over the grid.

One step runs the LARSO tail: apply the action, solve, run the cascading
failure loop (repeatedly tripping overflowed lines), compute the four-part
reward from that half-step state, then load the next injections and re-solve
to produce the next observation. A load cut ends the epoch with the
configured terminal reward and resets the topology to the reference.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import dc_power_flow as dc
from . import grid_model
from .chronics import InjectionSet
from .dc_power_flow import DcSolution
from .errors import (
    BadOneHot,
    BadShape,
    BadValue,
    EpisodeFinished,
    NoSolution,
    ShapeMismatch,
)
from .grid_model import GridCase, TopologyState

# float guard: a flow pinned exactly at its limit (ratio 1.0) is at-limit,
# not overflowed; only a genuine excess trips the protection
OVERFLOW_EPS = 1e-9


def is_overflowed(ratios: np.ndarray) -> np.ndarray:
    return np.asarray(ratios) > 1.0 + OVERFLOW_EPS


@dataclass(frozen=True)
class EnvConfig:
    action_unit_cost: float = 0.1
    load_cut_reward: float = -10_000.0
    cascade_max_iterations: int | None = None  # None: branch count + 1
    overflow_exponent: int = 2  # 2 per the reward design, 1 for |.| variant
    gamma: float = 0.99
    thermal_limit_override: tuple[float, ...] | None = None
    large_substation_threshold: int = 10
    large_substation_cap: int | None = 3  # None disables the whitelist

    def __post_init__(self):
        if self.action_unit_cost < 0:
            raise ValueError("action_unit_cost must be >= 0")
        if self.load_cut_reward > 0:
            raise ValueError("load_cut_reward must be <= 0")
        if self.overflow_exponent not in (1, 2):
            raise ValueError("overflow_exponent must be 1 or 2")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must be in [0, 1]")

    def to_dict(self) -> dict:
        return {
            "action_unit_cost": self.action_unit_cost,
            "load_cut_reward": self.load_cut_reward,
            "cascade_max_iterations": self.cascade_max_iterations,
            "overflow_exponent": self.overflow_exponent,
            "gamma": self.gamma,
            "thermal_limit_override": (
                list(self.thermal_limit_override)
                if self.thermal_limit_override is not None
                else None
            ),
            "large_substation_threshold": self.large_substation_threshold,
            "large_substation_cap": self.large_substation_cap,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EnvConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if data.get("thermal_limit_override") is not None:
            data = dict(data)
            data["thermal_limit_override"] = tuple(
                float(v) for v in data["thermal_limit_override"]
            )
        return cls(**data)


@dataclass(frozen=True)
class Action:
    """line_switches entries: 1 switch on, -1 switch off, 0 leave alone.
    substation_choices: None (leave alone) or a one-hot over that
    substation's configuration ids."""

    line_switches: np.ndarray
    substation_choices: tuple[np.ndarray | None, ...]

    @classmethod
    def do_nothing(cls, grid: GridCase) -> "Action":
        return cls(
            line_switches=np.zeros(grid.n_branches, dtype=np.int8),
            substation_choices=(None,) * grid.n_substations,
        )

    def with_line(self, branch: int, value: int) -> "Action":
        switches = np.array(self.line_switches, dtype=np.int8)
        switches[branch] = value
        return replace(self, line_switches=switches)

    def with_configuration(
        self, grid: GridCase, sub_index: int, config_id: int
    ) -> "Action":
        onehot = np.zeros(
            grid.substations[sub_index].n_configurations, dtype=np.int8
        )
        onehot[config_id] = 1
        choices = list(self.substation_choices)
        choices[sub_index] = onehot
        return replace(self, substation_choices=tuple(choices))


@dataclass(frozen=True)
class RewardBreakdown:
    line_usage: float
    load_cut: float
    action_cost: float
    distance_to_reference: float
    total: float

    @classmethod
    def build(
        cls, line_usage: float, load_cut: float, action_cost: float,
        distance_to_reference: float,
    ) -> "RewardBreakdown":
        # + 0.0 folds negative zeros away
        return cls(
            line_usage=line_usage + 0.0,
            load_cut=load_cut + 0.0,
            action_cost=action_cost + 0.0,
            distance_to_reference=distance_to_reference + 0.0,
            total=line_usage + load_cut + action_cost + distance_to_reference,
        )


@dataclass(frozen=True)
class Observation:
    """Fixed-size agent view of a solved state. In DC mode all Q are 0,
    all V are 1 p.u. and origin P = -extremity P."""

    prod_pqv: np.ndarray  # (n_gen, 3)
    load_pqv: np.ndarray  # (n_load, 3)
    line_pqv_origin: np.ndarray  # (n_branch, 3)
    line_pqv_extremity: np.ndarray  # (n_branch, 3)
    relative_thermal_limits: np.ndarray  # (n_branch,)
    topology_onehot: np.ndarray  # concatenated per-substation one-hots
    line_status: np.ndarray  # (n_branch,) in {0, 1}


@dataclass(frozen=True)
class CascadeFrame:
    tripped: tuple[int, ...]  # branches switched off entering this frame
    flows_mw: np.ndarray | None
    overflowed: tuple[int, ...]
    load_was_cut: bool
    budget_exceeded: bool = False


@dataclass(frozen=True)
class CascadeResult:
    solution: DcSolution | None
    topology: TopologyState
    load_was_cut: bool
    frames: tuple[CascadeFrame, ...]


# --- action plumbing ---------------------------------------------------------

def validate(env: "Environment", action: Action) -> None:
    """Shape/value/one-hot checks only; flows are never consulted."""
    grid = env.grid
    switches = np.asarray(action.line_switches)
    if switches.shape != (grid.n_branches,):
        raise BadShape(
            f"line_switches has shape {switches.shape}, expected "
            f"({grid.n_branches},)"
        )
    if not np.isin(switches, (-1, 0, 1)).all():
        bad = int(np.flatnonzero(~np.isin(switches, (-1, 0, 1)))[0])
        raise BadValue(
            f"line_switches[{bad}] = {switches[bad]} not in {{-1, 0, 1}}",
            branch=bad,
        )
    if len(action.substation_choices) != grid.n_substations:
        raise BadShape(
            f"{len(action.substation_choices)} substation choices for "
            f"{grid.n_substations} substations"
        )
    for i, choice in enumerate(action.substation_choices):
        if choice is None:
            continue
        onehot = np.asarray(choice)
        sub = grid.substations[i]
        if onehot.shape != (sub.n_configurations,):
            raise BadOneHot(
                f"substation {sub.id}: one-hot of length {onehot.shape} for "
                f"{sub.n_configurations} configurations",
                substation=sub.id,
            )
        if not np.isin(onehot, (0, 1)).all() or int(onehot.sum()) != 1:
            raise BadOneHot(
                f"substation {sub.id}: choice vector must contain exactly "
                "one 1",
                substation=sub.id,
            )
        target = int(np.argmax(onehot))
        if target not in env.allowed_configurations(i):
            raise BadValue(
                f"substation {sub.id}: configuration {target} is outside "
                "the large-substation whitelist",
                substation=sub.id,
            )


def apply_action(topology: TopologyState, action: Action) -> TopologyState:
    """Line i: status <- 1 on switch 1, <- 0 on switch -1, else unchanged
    (re-asserting the current status is legal and idempotent). Substation
    choices replace the configuration id where present."""
    out = topology.copy()
    switches = np.asarray(action.line_switches)
    out.line_status[switches == 1] = 1
    out.line_status[switches == -1] = 0
    for i, choice in enumerate(action.substation_choices):
        if choice is not None:
            out.configuration_ids[i] = int(np.argmax(np.asarray(choice)))
    return out


def count_atomic_operations(
    before: TopologyState, action: Action
) -> tuple[int, int, int]:
    """(disconnections, reconnections, configuration changes) the action
    actually performs; idempotent re-asserts are free."""
    switches = np.asarray(action.line_switches)
    disconnections = int(((switches == -1) & (before.line_status == 1)).sum())
    reconnections = int(((switches == 1) & (before.line_status == 0)).sum())
    changes = 0
    for i, choice in enumerate(action.substation_choices):
        if choice is None:
            continue
        if int(np.argmax(np.asarray(choice))) != before.configuration_ids[i]:
            changes += 1
    return disconnections, reconnections, changes


# --- physics loop ------------------------------------------------------------

def cascade(
    grid: GridCase,
    topology: TopologyState,
    injections: InjectionSet,
    config: EnvConfig,
) -> CascadeResult:
    """Repeatedly solve and trip every overflowed line until none remains,
    a load is islanded away from all sources (load cut), or the iteration
    budget runs out (pathological; treated as a load cut)."""
    limits = effective_limits(grid, config)
    topo = topology.copy()
    frames: list[CascadeFrame] = []
    tripped: tuple[int, ...] = ()
    budget = (
        config.cascade_max_iterations
        if config.cascade_max_iterations is not None
        else grid.n_branches + 1
    )

    for _ in range(budget + 1):
        expanded = grid_model.expand(grid, topo)
        solution = dc.solve_expanded(
            expanded, injections.prod_p, injections.load_p
        )
        ratios = solution.branch_current_proxy / limits
        over = (topo.line_status == 1) & is_overflowed(ratios)
        over_ids = tuple(int(i) for i in np.flatnonzero(over))
        if not solution.converged:
            frames.append(
                CascadeFrame(tripped, solution.branch_p.copy(), over_ids, True)
            )
            return CascadeResult(solution, topo, True, tuple(frames))
        frames.append(
            CascadeFrame(tripped, solution.branch_p.copy(), over_ids, False)
        )
        if not over_ids:
            return CascadeResult(solution, topo, False, tuple(frames))
        topo.line_status[over] = 0
        tripped = over_ids

    frames.append(CascadeFrame(tripped, None, (), True, budget_exceeded=True))
    return CascadeResult(None, topo, True, tuple(frames))


def effective_limits(grid: GridCase, config: EnvConfig) -> np.ndarray:
    if config.thermal_limit_override is None:
        return grid.thermal_limits
    limits = np.asarray(config.thermal_limit_override, dtype=float)
    if limits.shape != (grid.n_branches,):
        raise ShapeMismatch(
            f"thermal_limit_override needs {grid.n_branches} entries"
        )
    return limits


def reward(
    grid: GridCase,
    config: EnvConfig,
    cascade_result: CascadeResult,
    action: Action,
    topology_before: TopologyState,
    load_was_cut: bool,
) -> RewardBreakdown:
    """Sum of the four subrewards, each <= 0."""
    if load_was_cut or cascade_result.solution is None:
        line_usage = 0.0
    else:
        topo = cascade_result.topology
        ratios = (
            cascade_result.solution.branch_current_proxy
            / effective_limits(grid, config)
        )
        in_service = topo.line_status == 1
        line_usage = -float(
            np.sum(ratios[in_service] ** config.overflow_exponent)
        )

    disc, reco, changes = count_atomic_operations(topology_before, action)
    action_cost = -config.action_unit_cost * (disc + reco + changes)
    distance = -float(
        grid_model.topology_distance(
            cascade_result.topology, grid.reference_topology
        )
    )
    load_cut = config.load_cut_reward if load_was_cut else 0.0
    return RewardBreakdown.build(line_usage, load_cut, action_cost, distance)


# --- observation -------------------------------------------------------------

def observe(env: "Environment") -> Observation:
    """Export the agent-visible view; solver internals stay hidden."""
    solution = env.solution
    if solution is None or not solution.converged:
        raise NoSolution("state carries no converged solution")
    grid = env.grid
    expanded = env.expanded
    injections = env.injections

    flows = solution.branch_p
    n_branch = grid.n_branches

    prod = np.zeros((len(grid.generators), 3))
    realized = np.where(
        [g.in_service for g in grid.generators], injections.prod_p, 0.0
    ).astype(float)
    realized[~solution.bus_alive[expanded.gen_bus]] = 0.0
    # reference buses absorb their island's mismatch; attribute it to the
    # first in-service generator sitting there (zero everywhere else, where
    # the bus balance already holds)
    p_target = dc.bus_injections(expanded, injections.prod_p, injections.load_p)
    outgoing = np.zeros(expanded.n_buses)
    np.add.at(outgoing, expanded.branch_from_bus, flows)
    np.subtract.at(outgoing, expanded.branch_to_bus, flows)
    attributed: set[int] = set()
    for g in grid.generators:
        bus = int(expanded.gen_bus[g.index])
        if g.in_service and solution.bus_alive[bus] and bus not in attributed:
            realized[g.index] += outgoing[bus] - p_target[bus]
            attributed.add(bus)
    prod[:, 0] = realized
    prod[:, 2] = 1.0

    load = np.zeros((len(grid.loads), 3))
    load[:, 0] = np.where(
        solution.bus_alive[expanded.load_bus], injections.load_p, 0.0
    )
    load[:, 1] = injections.load_q
    load[:, 2] = 1.0

    origin = np.zeros((n_branch, 3))
    origin[:, 0] = flows
    origin[:, 2] = 1.0
    extremity = np.zeros((n_branch, 3))
    extremity[:, 0] = -flows
    extremity[:, 2] = 1.0

    relative = solution.branch_current_proxy / env.limits

    offsets = env.onehot_offsets
    onehot = np.zeros(int(offsets[-1]), dtype=np.int8)
    onehot[offsets[:-1] + env.topology.configuration_ids] = 1

    return Observation(
        prod_pqv=prod,
        load_pqv=load,
        line_pqv_origin=origin,
        line_pqv_extremity=extremity,
        relative_thermal_limits=relative,
        topology_onehot=onehot,
        line_status=env.topology.line_status.copy(),
    )


def overflow_count(observation: Observation) -> int:
    """In-service branches whose loading ratio exceeds 1."""
    return int(
        (
            (observation.line_status == 1)
            & is_overflowed(observation.relative_thermal_limits)
        ).sum()
    )


def floor_overflow_metric(observation: Observation) -> int:
    """Diagnostic floor-sum variant; equals overflow_count only while every
    ratio stays below 2."""
    r = observation.relative_thermal_limits[observation.line_status == 1]
    return int(np.floor(r).sum())


# --- the environment ---------------------------------------------------------

class Environment:
    """Single-writer game state. step() mutates; simulate() never does and
    may run concurrently with other simulate() calls."""

    def __init__(self, grid: GridCase, config: EnvConfig | None = None):
        self.grid = grid
        self.config = config or EnvConfig()
        self.limits = effective_limits(grid, self.config)
        self.onehot_offsets = grid.onehot_offsets()
        self._allowed = tuple(
            grid_model.allowed_configuration_ids(
                sub,
                threshold=self.config.large_substation_threshold,
                cap=self.config.large_substation_cap,
            )
            for sub in grid.substations
        )
        self.topology = grid.reference_topology
        self.injections: InjectionSet | None = None
        self.expanded: grid_model.ExpandedGrid | None = None
        self.solution: DcSolution | None = None
        self.step_index = 0
        self.done = True

    def allowed_configurations(self, sub_index: int) -> tuple[int, ...]:
        return self._allowed[sub_index]

    def reset(self, injections: InjectionSet) -> Observation:
        """Start an epoch: reference topology, given injections, solved."""
        if injections.prod_p.shape != (len(self.grid.generators),):
            raise ShapeMismatch("prod_p length does not match the grid")
        if injections.load_p.shape != (len(self.grid.loads),):
            raise ShapeMismatch("load_p length does not match the grid")
        self.topology = self.grid.reference_topology
        self.injections = injections
        self._solve_current()
        self.done = False
        return observe(self)

    def _solve_current(self) -> None:
        self.expanded = grid_model.expand(self.grid, self.topology)
        self.solution = dc.solve_expanded(
            self.expanded, self.injections.prod_p, self.injections.load_p
        )

    def step(
        self, action: Action, next_injections: InjectionSet | None
    ) -> tuple["Environment", Observation | None, RewardBreakdown, bool, dict]:
        """One LARSO tail. next_injections=None means the schedule is
        exhausted: the reward is still computed, then the episode ends."""
        if self.done:
            raise EpisodeFinished("episode is over; reset before stepping")
        validate(self, action)

        before = self.topology
        staged = apply_action(before, action)
        result = cascade(self.grid, staged, self.injections, self.config)
        breakdown = reward(
            self.grid, self.config, result, action, before, result.load_was_cut
        )
        info = {
            "cascade_frames": result.frames,
            "load_was_cut": result.load_was_cut,
        }

        observation: Observation | None = None
        if result.load_was_cut:
            # game over: the next epoch starts from the reference wiring
            self.done = True
            self.topology = self.grid.reference_topology
            self.expanded = None
            self.solution = None
        elif next_injections is None:
            self.done = True
            self.topology = result.topology
            self.solution = result.solution
            self.expanded = grid_model.expand(self.grid, result.topology)
            info["chronic_exhausted"] = True
        else:
            self.topology = result.topology
            self.injections = next_injections
            self._solve_current()
            if not self.solution.converged:
                # defensive: post-cascade islands all hold a source, so new
                # injections cannot orphan a load; flag it if it ever happens
                self.done = True
                info["load_cut_at_injection"] = True
            else:
                observation = observe(self)

        self.step_index += 1
        return self, observation, breakdown, self.done, info

    def simulate(self, action: Action) -> RewardBreakdown:
        """The reward step() would return for this action, without touching
        any state. Identical inputs give identical results."""
        breakdown, _ = self.simulate_detailed(action)
        return breakdown

    def simulate_detailed(
        self, action: Action
    ) -> tuple[RewardBreakdown, dict]:
        if self.done:
            raise EpisodeFinished("episode is over; reset before simulating")
        validate(self, action)
        before = self.topology
        staged = apply_action(before, action)
        result = cascade(self.grid, staged, self.injections, self.config)
        breakdown = reward(
            self.grid, self.config, result, action, before, result.load_was_cut
        )
        # the overflows the action immediately yields (the cascade then
        # trips them, so the final state never shows any)
        predicted = result.frames[0].overflowed
        details = {
            "cascade_frames": result.frames,
            "load_was_cut": result.load_was_cut,
            "predicted_overflows": predicted,
        }
        return breakdown, details

    def observe(self) -> Observation:
        return observe(self)
