"""gridgame: a power-grid operation game engine.

DC load flow over MATPOWER-style cases, substation-level topology control
with node splitting, cascading-failure simulation, a four-part reward, and
the LARSO environment loop — plus baseline agents, an episode runner and a
session HTTP API for the operator UI.
"""
from .case_io import RawCase, parse_case, serialize_case
from .catalog import load_case
from .chronics import Chronic, InjectionSet, load_chronic
from .dc_power_flow import (
    DcSolution,
    SusceptanceModel,
    assemble,
    current_proxy,
    find_islands,
    solve,
)
from .environment import (
    Action,
    EnvConfig,
    Environment,
    Observation,
    RewardBreakdown,
    overflow_count,
)
from .grid_model import (
    ExpandedGrid,
    GridCase,
    TopologyState,
    build_grid,
    enumerate_configurations,
    expand,
    topology_distance,
)
from .runner import EpisodeLog, benchmark, run_episode

__version__ = "0.1.0"

__all__ = [
    "Action",
    "Chronic",
    "DcSolution",
    "EnvConfig",
    "Environment",
    "EpisodeLog",
    "ExpandedGrid",
    "GridCase",
    "InjectionSet",
    "Observation",
    "RawCase",
    "RewardBreakdown",
    "SusceptanceModel",
    "TopologyState",
    "assemble",
    "benchmark",
    "build_grid",
    "current_proxy",
    "enumerate_configurations",
    "expand",
    "find_islands",
    "load_case",
    "load_chronic",
    "overflow_count",
    "parse_case",
    "run_episode",
    "serialize_case",
    "solve",
    "topology_distance",
]
