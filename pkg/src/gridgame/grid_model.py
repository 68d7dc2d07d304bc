"""Substation-level grid model.

A substation hosts elements (branch ends, generators, loads) that can be
split across at most two buses, with no single-element group. The model
enumerates the legal two-bus partitions of every substation once, and
expands a topology choice (per-substation configuration id + per-line
service status) into a concrete bus-level grid for the solver.
"""
from __future__ import annotations

import weakref
from dataclasses import dataclass, replace

import numpy as np

from . import case_io
from .case_io import RawCase
from .errors import (
    ConfigurationIdOutOfRange,
    InvalidElementCount,
    ShapeMismatch,
    SubstationTooSmall,
)

# element kinds
BRANCH_FROM = "branch_from"
BRANCH_TO = "branch_to"
GENERATOR = "gen"
LOAD = "load"


@dataclass(frozen=True)
class ElementRef:
    kind: str
    index: int  # branch / generator / load index in its own table


@dataclass(frozen=True)
class SubstationConfiguration:
    """One legal partition. bus_b_mask bit j set = element j on bus B.

    id 0 is always the everything-on-one-bus partition; element 0 is pinned
    to bus A so relabeling A/B never produces a second id for the same
    physical configuration.
    """

    id: int
    bus_b_mask: int

    def sides(self, n_elements: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        a = tuple(j for j in range(n_elements) if not self.bus_b_mask >> j & 1)
        b = tuple(j for j in range(n_elements) if self.bus_b_mask >> j & 1)
        return a, b


def enumerate_configurations(n: int) -> tuple[SubstationConfiguration, ...]:
    """All canonical two-bus partitions of n elements with no singleton group.

    Ordered: id 0 = all on bus A, then ascending bus-B bitmask. Length is
    2^(n-1) - n for n >= 3 and 1 for n = 2 (the closed form degenerates
    there; enumeration is authoritative).
    """
    if n < 2:
        raise InvalidElementCount(f"a substation needs >= 2 elements, got {n}")
    configs = []
    for mask in range(0, 1 << n, 2):  # even masks keep element 0 on bus A
        k = bin(mask).count("1")
        if k == 1 or k == n - 1:
            continue
        if k == n:  # unreachable for even masks, kept for clarity
            continue
        configs.append(SubstationConfiguration(id=len(configs), bus_b_mask=mask))
    return tuple(configs)


@dataclass(frozen=True)
class Substation:
    id: int  # bus id from the case file
    index: int
    elements: tuple[ElementRef, ...]
    configurations: tuple[SubstationConfiguration, ...]

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    @property
    def n_configurations(self) -> int:
        return len(self.configurations)


@dataclass(frozen=True)
class Branch:
    index: int
    from_sub: int
    to_sub: int
    resistance: float
    reactance: float
    charging: float
    rate_a: float


@dataclass(frozen=True)
class Generator:
    index: int
    sub: int
    bus_id: int
    pg: float
    pmax: float
    in_service: bool


@dataclass(frozen=True)
class Load:
    index: int
    sub: int
    bus_id: int
    pd: float
    qd: float


@dataclass
class TopologyState:
    """Decoupled topology: configuration id per substation + line status."""

    configuration_ids: np.ndarray  # int per substation
    line_status: np.ndarray  # int8 per branch, 1 in service

    def copy(self) -> "TopologyState":
        return TopologyState(
            self.configuration_ids.copy(), self.line_status.copy()
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TopologyState)
            and np.array_equal(self.configuration_ids, other.configuration_ids)
            and np.array_equal(self.line_status, other.line_status)
        )


@dataclass(frozen=True, eq=False)  # identity equality; grids are singletons
class GridCase:
    name: str
    base_mva: float
    substations: tuple[Substation, ...]
    branches: tuple[Branch, ...]
    generators: tuple[Generator, ...]
    loads: tuple[Load, ...]
    thermal_limits: np.ndarray  # MW per branch, > 0 (inf when unrated)
    slack_sub: int
    raw: RawCase

    @property
    def n_substations(self) -> int:
        return len(self.substations)

    @property
    def n_branches(self) -> int:
        return len(self.branches)

    @property
    def reference_topology(self) -> TopologyState:
        return TopologyState(
            configuration_ids=np.zeros(self.n_substations, dtype=np.int64),
            line_status=np.ones(self.n_branches, dtype=np.int8),
        )

    def onehot_offsets(self) -> np.ndarray:
        """Start offset of each substation's one-hot block."""
        sizes = [s.n_configurations for s in self.substations]
        return np.concatenate([[0], np.cumsum(sizes)])

    def with_thermal_limits(self, limits) -> "GridCase":
        limits = np.asarray(limits, dtype=float)
        if limits.shape != (self.n_branches,):
            raise ShapeMismatch(
                f"expected {self.n_branches} thermal limits, got {limits.shape}"
            )
        if not (limits > 0).all():
            raise ShapeMismatch("thermal limits must be > 0")
        return replace(self, thermal_limits=limits)


def build_grid(case: RawCase, name: str | None = None) -> GridCase:
    """Assemble the substation model from parsed case rows.

    One substation per bus row; branch ends, generators and loads become
    elements in that order. The reference topology is all lines in service
    with every substation on a single bus.
    """
    sub_of_bus = {int(r[case_io.BUS_ID]): i for i, r in enumerate(case.bus_rows)}

    branches = tuple(
        Branch(
            index=i,
            from_sub=sub_of_bus[int(r[case_io.BR_FROM])],
            to_sub=sub_of_bus[int(r[case_io.BR_TO])],
            resistance=r[case_io.BR_R],
            reactance=r[case_io.BR_X],
            charging=r[case_io.BR_B],
            rate_a=r[case_io.BR_RATE_A],
        )
        for i, r in enumerate(case.branch_rows)
    )
    generators = tuple(
        Generator(
            index=i,
            sub=sub_of_bus[int(r[case_io.GEN_BUS])],
            bus_id=int(r[case_io.GEN_BUS]),
            pg=r[case_io.GEN_PG],
            pmax=r[case_io.GEN_PMAX],
            in_service=r[case_io.GEN_STATUS] > 0,
        )
        for i, r in enumerate(case.gen_rows)
    )
    loads = tuple(
        Load(
            index=i,
            sub=sub_of_bus[int(r[case_io.BUS_ID])],
            bus_id=int(r[case_io.BUS_ID]),
            pd=r[case_io.BUS_PD],
            qd=r[case_io.BUS_QD],
        )
        for i, r in enumerate(
            r for r in case.bus_rows
            if r[case_io.BUS_PD] != 0.0 or r[case_io.BUS_QD] != 0.0
        )
    )

    elements: list[list[ElementRef]] = [[] for _ in case.bus_rows]
    for br in branches:
        elements[br.from_sub].append(ElementRef(BRANCH_FROM, br.index))
        elements[br.to_sub].append(ElementRef(BRANCH_TO, br.index))
    for g in generators:
        elements[g.sub].append(ElementRef(GENERATOR, g.index))
    for ld in loads:
        elements[ld.sub].append(ElementRef(LOAD, ld.index))

    enum_cache: dict[int, tuple[SubstationConfiguration, ...]] = {}
    substations = []
    for i, row in enumerate(case.bus_rows):
        elems = tuple(elements[i])
        if len(elems) < 2:
            raise SubstationTooSmall(
                f"substation {int(row[case_io.BUS_ID])} hosts "
                f"{len(elems)} element(s); the minimum is 2",
                bus=int(row[case_io.BUS_ID]),
            )
        n = len(elems)
        if n not in enum_cache:
            enum_cache[n] = enumerate_configurations(n)
        substations.append(
            Substation(
                id=int(row[case_io.BUS_ID]),
                index=i,
                elements=elems,
                configurations=enum_cache[n],
            )
        )

    limits = np.array(
        [r[case_io.BR_RATE_A] if r[case_io.BR_RATE_A] > 0 else np.inf
         for r in case.branch_rows]
    )
    slack_sub = next(
        i for i, r in enumerate(case.bus_rows)
        if int(r[case_io.BUS_TYPE]) == case_io.SLACK_TYPE
    )

    return GridCase(
        name=name or case.name,
        base_mva=case.base_mva,
        substations=tuple(substations),
        branches=branches,
        generators=generators,
        loads=loads,
        thermal_limits=limits,
        slack_sub=slack_sub,
        raw=case,
    )


@dataclass(frozen=True)
class ExpandedGrid:
    """Bus-level view of one topology: the solver input.

    Substation i contributes bus i (side A) always, and a second bus when
    its configuration places elements on side B. Every created bus holds at
    least one element, so none is isolated in the case-file sense.
    """

    grid: GridCase
    n_buses: int
    bus_sub: np.ndarray  # owning substation per bus
    bus_side: np.ndarray  # 0 = A, 1 = B
    branch_from_bus: np.ndarray
    branch_to_bus: np.ndarray
    reactance: np.ndarray
    active: np.ndarray  # bool, line_status == 1
    gen_bus: np.ndarray
    load_bus: np.ndarray
    slack_bus: int

    @property
    def n_active_branches(self) -> int:
        return int(self.active.sum())


@dataclass(frozen=True)
class _Wiring:
    """Element-to-bus assignment; depends only on configuration ids."""

    n_buses: int
    bus_sub: np.ndarray
    bus_side: np.ndarray
    branch_from_bus: np.ndarray
    branch_to_bus: np.ndarray
    gen_bus: np.ndarray
    load_bus: np.ndarray
    slack_bus: int
    reactance: np.ndarray


_wiring_cache: "weakref.WeakKeyDictionary[GridCase, dict]" = (
    weakref.WeakKeyDictionary()
)
_WIRING_CACHE_LIMIT = 4096


def _build_wiring(grid: GridCase, masks: list[int]) -> _Wiring:
    n_sub = grid.n_substations
    bus_sub = list(range(n_sub))
    bus_side = [0] * n_sub
    b_bus_of_sub = {}
    for i, mask in enumerate(masks):
        if mask:
            b_bus_of_sub[i] = len(bus_sub)
            bus_sub.append(i)
            bus_side.append(1)

    position = {
        el: (s.index, j)
        for s in grid.substations
        for j, el in enumerate(s.elements)
    }

    def bus_of(element: ElementRef) -> int:
        sub_index, j = position[element]
        if masks[sub_index] >> j & 1:
            return b_bus_of_sub[sub_index]
        return sub_index

    branch_from_bus = np.array(
        [bus_of(ElementRef(BRANCH_FROM, br.index)) for br in grid.branches],
        dtype=np.int64,
    )
    branch_to_bus = np.array(
        [bus_of(ElementRef(BRANCH_TO, br.index)) for br in grid.branches],
        dtype=np.int64,
    )
    gen_bus = np.array(
        [bus_of(ElementRef(GENERATOR, g.index)) for g in grid.generators],
        dtype=np.int64,
    )
    load_bus = np.array(
        [bus_of(ElementRef(LOAD, ld.index)) for ld in grid.loads],
        dtype=np.int64,
    )

    # slack bus: the slack substation's bus that hosts its first in-service
    # generator; side A when it has none
    slack_bus = grid.slack_sub
    for g in grid.generators:
        if g.sub == grid.slack_sub and g.in_service:
            slack_bus = int(gen_bus[g.index])
            break

    return _Wiring(
        n_buses=len(bus_sub),
        bus_sub=np.array(bus_sub, dtype=np.int64),
        bus_side=np.array(bus_side, dtype=np.int64),
        branch_from_bus=branch_from_bus,
        branch_to_bus=branch_to_bus,
        gen_bus=gen_bus,
        load_bus=load_bus,
        slack_bus=int(slack_bus),
        reactance=np.array([br.reactance for br in grid.branches]),
    )


def expand(grid: GridCase, topo: TopologyState) -> ExpandedGrid:
    """Wire every element to its bus per the substation configurations.

    The wiring is cached per configuration vector (line status only flips
    the active mask), which keeps the greedy baseline's hundreds of what-if
    expansions per step cheap.
    """
    n_sub = grid.n_substations
    if topo.configuration_ids.shape != (n_sub,) or topo.line_status.shape != (
        grid.n_branches,
    ):
        raise ShapeMismatch("topology arrays do not match the grid")

    masks = []
    for sub, cid in zip(grid.substations, topo.configuration_ids):
        if not 0 <= cid < sub.n_configurations:
            raise ConfigurationIdOutOfRange(
                f"substation {sub.id}: configuration {cid} out of range "
                f"[0, {sub.n_configurations})",
                substation=sub.id,
            )
        masks.append(sub.configurations[cid].bus_b_mask)

    per_grid = _wiring_cache.setdefault(grid, {})
    key = tuple(int(c) for c in topo.configuration_ids)
    wiring = per_grid.get(key)
    if wiring is None:
        if len(per_grid) >= _WIRING_CACHE_LIMIT:
            per_grid.clear()
        wiring = _build_wiring(grid, masks)
        per_grid[key] = wiring

    return ExpandedGrid(
        grid=grid,
        n_buses=wiring.n_buses,
        bus_sub=wiring.bus_sub,
        bus_side=wiring.bus_side,
        branch_from_bus=wiring.branch_from_bus,
        branch_to_bus=wiring.branch_to_bus,
        reactance=wiring.reactance,
        active=np.asarray(topo.line_status, dtype=np.int8) == 1,
        gen_bus=wiring.gen_bus,
        load_bus=wiring.load_bus,
        slack_bus=wiring.slack_bus,
    )


def topology_distance(a: TopologyState, b: TopologyState) -> int:
    """Number of substations whose configuration differs (line status is
    priced by the action-cost subreward, not here)."""
    if a.configuration_ids.shape != b.configuration_ids.shape:
        raise ShapeMismatch("topologies defined over different grids")
    return int((a.configuration_ids != b.configuration_ids).sum())


def allowed_configuration_ids(
    sub: Substation, threshold: int = 10, cap: int | None = 3
) -> tuple[int, ...]:
    """Action whitelist for one substation.

    Substations with more than `threshold` elements only expose partitions
    whose smaller group has at most `cap` elements; cap=None disables the
    restriction. Observation one-hot sizes always use the full enumeration.
    """
    n = sub.n_elements
    if cap is None or n <= threshold:
        return tuple(range(sub.n_configurations))
    out = []
    for cfg in sub.configurations:
        k = bin(cfg.bus_b_mask).count("1")
        if min(k, n - k) <= cap:
            out.append(cfg.id)
    return tuple(out)
