"""DC load flow over an expanded grid.

Lossless linearized model: per-unit voltage magnitudes pinned to 1, branch
coupling 1/x, net real power P_i = sum_k (theta_i - theta_k)/x_ik. One
reduced linear system is solved per connected component; the slack bus (or
an island's substitute reference) absorbs its component's mismatch. The
current proxy compared against thermal limits is |P| with Q = 0.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import NonpositiveReactance, SingularSystem
from .grid_model import ExpandedGrid

BALANCE_TOL = 1e-6


@dataclass(frozen=True)
class Island:
    buses: tuple[int, ...]
    has_generation: bool
    has_load: bool
    has_slack: bool


@dataclass(frozen=True)
class IslandPartition:
    labels: np.ndarray  # component id per bus
    islands: tuple[Island, ...]

    @property
    def n_islands(self) -> int:
        return len(self.islands)


def _union_find_labels(n: int, from_bus, to_bus) -> tuple[int, np.ndarray]:
    """Component label per bus, numbered by first appearance in bus order."""
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for f, t in zip(from_bus, to_bus):
        rf, rt = find(int(f)), find(int(t))
        if rf != rt:
            parent[max(rf, rt)] = min(rf, rt)

    labels = np.empty(n, dtype=np.int64)
    label_of_root: dict[int, int] = {}
    for b in range(n):
        root = find(b)
        if root not in label_of_root:
            label_of_root[root] = len(label_of_root)
        labels[b] = label_of_root[root]
    return len(label_of_root), labels


def find_islands(grid: ExpandedGrid) -> IslandPartition:
    """Connected components over active branches, with per-island flags."""
    act = np.flatnonzero(grid.active)
    n_comp, labels = _union_find_labels(
        grid.n_buses, grid.branch_from_bus[act], grid.branch_to_bus[act]
    )

    gen_alive = [
        int(grid.gen_bus[g.index])
        for g in grid.grid.generators
        if g.in_service
    ]
    islands = []
    for comp in range(n_comp):
        buses = tuple(int(b) for b in np.flatnonzero(labels == comp))
        islands.append(
            Island(
                buses=buses,
                has_generation=any(labels[b] == comp for b in gen_alive),
                has_load=any(labels[b] == comp for b in grid.load_bus),
                has_slack=labels[grid.slack_bus] == comp,
            )
        )
    return IslandPartition(labels=labels, islands=tuple(islands))


@dataclass(frozen=True)
class SusceptanceModel:
    """Nodal susceptance matrix plus the island structure needed to solve.

    Off-diagonals couple connected pairs with -1/x (parallel branches add);
    each diagonal is the negated sum of its row's off-diagonals, so every
    row sums to zero.
    """

    n_buses: int
    b_matrix: np.ndarray
    slack_bus: int
    per_unit_base: float
    partition: IslandPartition
    ref_of_island: np.ndarray  # reference bus per island, -1 = none
    grid: ExpandedGrid


def assemble(grid: ExpandedGrid) -> SusceptanceModel:
    """Build the susceptance model; inactive branches contribute nothing."""
    bad = np.flatnonzero(grid.active & (grid.reactance <= 0))
    if bad.size:
        raise NonpositiveReactance(
            f"branch {int(bad[0])} is in service with reactance "
            f"{grid.reactance[bad[0]]}",
            branch=int(bad[0]),
        )

    mat = _kernels.assemble_matrix(
        grid.n_buses,
        grid.branch_from_bus,
        grid.branch_to_bus,
        grid.reactance,
        grid.active.astype(bool),
    )
    partition = find_islands(grid)

    refs = np.full(partition.n_islands, -1, dtype=np.int64)
    slack_comp = partition.labels[grid.slack_bus]
    refs[slack_comp] = grid.slack_bus
    # islands cut off from the slack fall back to their largest in-service
    # generator bus (ties to the lowest generator index)
    for comp in range(partition.n_islands):
        if refs[comp] >= 0:
            continue
        best_pmax = -np.inf
        for g in grid.grid.generators:
            if not g.in_service:
                continue
            bus = int(grid.gen_bus[g.index])
            if partition.labels[bus] == comp and g.pmax > best_pmax:
                best_pmax = g.pmax
                refs[comp] = bus
    return SusceptanceModel(
        n_buses=grid.n_buses,
        b_matrix=mat,
        slack_bus=grid.slack_bus,
        per_unit_base=grid.grid.base_mva,
        partition=partition,
        ref_of_island=refs,
        grid=grid,
    )


@dataclass(frozen=True)
class DcSolution:
    theta: np.ndarray  # rad per bus, references at 0
    branch_p: np.ndarray  # MW, signed from -> to, 0 when out of service
    branch_current_proxy: np.ndarray  # |P| in MW-equivalent
    converged: bool  # False iff some load sits in an island with no source
    islands: IslandPartition
    bus_alive: np.ndarray  # bool; False in islands without any reference
    dead_islands: tuple[int, ...]
    slack_absorption_mw: float  # extra net MW the references supply


def solve(model: SusceptanceModel, injections_mw: np.ndarray) -> DcSolution:
    """Solve for angles and flows given per-bus net injections in MW.

    Balance per component is not required: each reference bus absorbs its
    island's mismatch. Islands holding load but no reference are reported
    dead (converged=False) rather than solved.
    """
    injections_mw = np.asarray(injections_mw, dtype=float)
    p_pu = injections_mw / model.per_unit_base
    g = model.grid

    if model.n_buses > _kernels._DENSE_LIMIT:
        theta, singular = _kernels.solve_islands_sparse(
            model.b_matrix, p_pu, model.partition.labels, model.ref_of_island
        )
    else:
        theta, singular = _kernels.solve_islands(
            model.b_matrix, p_pu, model.partition.labels, model.ref_of_island
        )
    if singular:
        raise SingularSystem(
            "reduced susceptance system is numerically rank-deficient"
        )

    bus_alive = model.ref_of_island[model.partition.labels] >= 0
    dead = tuple(
        comp
        for comp, island in enumerate(model.partition.islands)
        if model.ref_of_island[comp] < 0
    )
    converged = not any(
        model.partition.islands[comp].has_load for comp in dead
    )

    flows = _kernels.branch_flows(
        theta,
        g.branch_from_bus,
        g.branch_to_bus,
        g.reactance,
        (g.active & bus_alive[g.branch_from_bus]).astype(bool),
        model.per_unit_base,
    )
    absorption = -float(injections_mw[bus_alive].sum())

    return DcSolution(
        theta=theta,
        branch_p=flows,
        branch_current_proxy=np.abs(flows),
        converged=converged,
        islands=model.partition,
        bus_alive=bus_alive,
        dead_islands=dead,
        slack_absorption_mw=absorption,
    )


def current_proxy(solution: DcSolution) -> np.ndarray:
    """|P| / (|V| = 1 p.u.) with Q = 0: directly comparable to thermal
    limits in MW."""
    return solution.branch_current_proxy.copy()


def bus_injections(grid: ExpandedGrid, prod_p, load_p) -> np.ndarray:
    """Per-bus net MW from per-generator productions and per-load demands."""
    p = np.zeros(grid.n_buses)
    alive = np.array([g.in_service for g in grid.grid.generators])
    prod = np.where(alive, np.asarray(prod_p, dtype=float), 0.0)
    np.add.at(p, grid.gen_bus, prod)
    np.subtract.at(p, grid.load_bus, np.asarray(load_p, dtype=float))
    return p


def solve_expanded(grid: ExpandedGrid, prod_p, load_p) -> DcSolution:
    """Convenience: assemble + solve one expanded grid."""
    return solve(assemble(grid), bus_injections(grid, prod_p, load_p))
