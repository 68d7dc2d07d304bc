"""Canonical structured-text (JSON-ready) encoding of the exchange types.

Field names match the domain types verbatim; episode logs and the service
API both speak this dialect. schema_version guards future changes.
"""
from __future__ import annotations

import numpy as np

from .environment import Action, CascadeFrame, Observation, RewardBreakdown
from .errors import BadShape
from .grid_model import GridCase

SCHEMA_VERSION = 1


def reward_to_dict(breakdown: RewardBreakdown) -> dict:
    return {
        "line_usage": breakdown.line_usage,
        "load_cut": breakdown.load_cut,
        "action_cost": breakdown.action_cost,
        "distance_to_reference": breakdown.distance_to_reference,
        "total": breakdown.total,
    }


def reward_from_dict(data: dict) -> RewardBreakdown:
    return RewardBreakdown(
        line_usage=data["line_usage"],
        load_cut=data["load_cut"],
        action_cost=data["action_cost"],
        distance_to_reference=data["distance_to_reference"],
        total=data["total"],
    )


def observation_to_dict(obs: Observation) -> dict:
    return {
        "prod_pqv": obs.prod_pqv.tolist(),
        "load_pqv": obs.load_pqv.tolist(),
        "line_pqv_origin": obs.line_pqv_origin.tolist(),
        "line_pqv_extremity": obs.line_pqv_extremity.tolist(),
        "relative_thermal_limits": obs.relative_thermal_limits.tolist(),
        "topology_onehot": obs.topology_onehot.tolist(),
        "line_status": obs.line_status.tolist(),
    }


def action_to_dict(action: Action) -> dict:
    return {
        "line_switches": np.asarray(action.line_switches).tolist(),
        "substation_choices": [
            None if c is None else np.asarray(c).tolist()
            for c in action.substation_choices
        ],
    }


def action_from_dict(grid: GridCase, data: dict) -> Action:
    """Decode an action; shape errors surface as BadShape before any
    environment-level validation runs."""
    try:
        switches = np.asarray(data["line_switches"], dtype=np.int8)
        raw_choices = data["substation_choices"]
    except (KeyError, TypeError, ValueError) as exc:
        raise BadShape(f"malformed action payload: {exc}") from exc
    if not isinstance(raw_choices, (list, tuple)):
        raise BadShape("substation_choices must be a list")
    choices = tuple(
        None if c is None else np.asarray(c, dtype=np.int8)
        for c in raw_choices
    )
    return Action(line_switches=switches, substation_choices=choices)


def frame_to_dict(frame: CascadeFrame) -> dict:
    return {
        "tripped": list(frame.tripped),
        "flows_mw": None if frame.flows_mw is None else frame.flows_mw.tolist(),
        "overflowed": list(frame.overflowed),
        "load_was_cut": frame.load_was_cut,
        "budget_exceeded": frame.budget_exceeded,
    }
