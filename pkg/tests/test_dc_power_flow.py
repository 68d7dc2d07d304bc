from __future__ import annotations

import numpy as np
import pytest

from gridgame import _kernels, dc_power_flow as dc, grid_model
from gridgame.errors import NonpositiveReactance

from conftest import branch_row, bus_row, gen_row, make_toy_case, random_connected_case
from dc_oracle import dc_flows

PAPER_T0_FLOWS = {
    (1, 2): 82.86,
    (1, 4): 67.14,
    (2, 3): 77.99,
    (2, 4): 45.13,
    (3, 4): 72.01,
}


def expand_ref(grid):
    return grid_model.expand(grid, grid.reference_topology)


# --- assemble -----------------------------------------------------------------

def test_two_bus_matrix_values():
    case = make_toy_case(
        [bus_row(1, 3), bus_row(2, 1, pd=10.0)],
        [gen_row(1, 10.0)],
        [branch_row(1, 2, 0.5)],
    )
    model = dc.assemble(expand_ref(grid_model.build_grid(case)))
    np.testing.assert_allclose(model.b_matrix, [[2.0, -2.0], [-2.0, 2.0]])
    np.testing.assert_allclose(model.b_matrix.sum(axis=1), 0.0, atol=1e-12)


def test_parallel_branches_add():
    case = make_toy_case(
        [bus_row(1, 3), bus_row(2, 1, pd=10.0)],
        [gen_row(1, 10.0)],
        [branch_row(1, 2, 0.5), branch_row(1, 2, 0.25)],
    )
    model = dc.assemble(expand_ref(grid_model.build_grid(case)))
    assert model.b_matrix[0, 1] == pytest.approx(-(1 / 0.5 + 1 / 0.25))


def test_case4gs_row_sums(grid4):
    model = dc.assemble(expand_ref(grid4))
    assert np.abs(model.b_matrix.sum(axis=1)).max() < 1e-9
    np.testing.assert_allclose(model.b_matrix, model.b_matrix.T, atol=0)


def test_nonpositive_reactance_rejected():
    case = make_toy_case(
        [bus_row(1, 3), bus_row(2, 1, pd=10.0)],
        [gen_row(1, 10.0)],
        [branch_row(1, 2, -0.1)],
    )
    with pytest.raises(NonpositiveReactance):
        dc.assemble(expand_ref(grid_model.build_grid(case)))
    # out of service: the bad branch contributes nothing, so no error
    case_off = make_toy_case(
        [bus_row(1, 3), bus_row(2, 1, pd=10.0)],
        [gen_row(1, 10.0)],
        [branch_row(1, 2, 0.1), branch_row(1, 2, -0.1)],
    )
    grid_off = grid_model.build_grid(case_off)
    topo = grid_off.reference_topology
    topo.line_status[1] = 0
    dc.assemble(grid_model.expand(grid_off, topo))


# --- solve --------------------------------------------------------------------

def test_two_bus_hand_solution(two_bus_grid):
    ex = expand_ref(two_bus_grid)
    solution = dc.solve_expanded(ex, [100.0], [100.0])
    # +1 p.u. at bus 1 through coupling 1 p.u.: theta_1 = 1 rad, flow 1 p.u.
    assert solution.theta[0] == pytest.approx(1.0)
    assert solution.theta[1] == 0.0
    assert solution.branch_p[0] == pytest.approx(100.0)
    assert solution.converged


def test_ring3_splits_two_thirds_one_third(ring3_grid):
    solution = dc.solve_expanded(expand_ref(ring3_grid), [100.0], [100.0])
    # direct path 1->2 carries 2/3, the detour through the slack 1/3
    assert solution.branch_p[0] == pytest.approx(200 / 3)
    assert solution.branch_p[1] == pytest.approx(100 / 3)
    assert solution.branch_p[2] == pytest.approx(-100 / 3)


def test_case4gs_t0_matches_figure_and_oracle(grid4, case4gs_text):
    solution = dc.solve_expanded(expand_ref(grid4), [150.0, 50.0], [50.0, 150.0])
    for br in grid4.branches:
        key = (grid4.substations[br.from_sub].id, grid4.substations[br.to_sub].id)
        assert abs(solution.branch_p[br.index]) == pytest.approx(
            PAPER_T0_FLOWS[key], abs=0.5
        )
    oracle = dc_flows(case4gs_text, prod_p=[150.0, 50.0], load_p=[50.0, 150.0])
    np.testing.assert_allclose(solution.branch_p, oracle, atol=1e-9)


def test_current_proxy_is_flow_magnitude(grid4):
    solution = dc.solve_expanded(expand_ref(grid4), [150.0, 50.0], [50.0, 150.0])
    np.testing.assert_array_equal(
        dc.current_proxy(solution), np.abs(solution.branch_p)
    )
    topo = grid4.reference_topology
    topo.line_status[:] = 0
    dead = dc.solve_expanded(grid_model.expand(grid4, topo), [0.0, 0.0], [0.0, 0.0])
    assert dc.current_proxy(dead).max() == 0.0


def test_slack_absorbs_imbalance(grid4):
    solution = dc.solve_expanded(expand_ref(grid4), [150.0, 50.0], [50.0, 130.0])
    assert solution.slack_absorption_mw == pytest.approx(-20.0)
    assert solution.converged


# --- balance / linearity / superposition properties ----------------------------

def balance_residuals(grid, ex, solution, prod, load):
    p = dc.bus_injections(ex, prod, load)
    outgoing = np.zeros(ex.n_buses)
    np.add.at(outgoing, ex.branch_from_bus, solution.branch_p)
    np.subtract.at(outgoing, ex.branch_to_bus, solution.branch_p)
    return outgoing - p


def test_property_suite_on_random_grids():
    rng = np.random.default_rng(7)
    for trial in range(100):
        n = int(rng.integers(3, 9))
        grid = grid_model.build_grid(random_connected_case(rng, n))
        ex = expand_ref(grid)
        model = dc.assemble(ex)
        assert np.abs(model.b_matrix.sum(axis=1)).max() < 1e-9

        load1 = np.array([ld.pd for ld in grid.loads])
        prod1 = np.array([g.pg for g in grid.generators])
        sol1 = dc.solve_expanded(ex, prod1, load1)
        residuals = balance_residuals(grid, ex, sol1, prod1, load1)
        non_slack = np.arange(ex.n_buses) != ex.slack_bus
        assert np.abs(residuals[non_slack]).max() < 1e-6 * grid.base_mva
        # global: the slack soaks up exactly the mismatch
        assert abs(residuals.sum()) < 1e-6 * grid.base_mva

        # linearity
        alpha = float(rng.uniform(0.2, 3.0))
        sol_a = dc.solve_expanded(ex, alpha * prod1, alpha * load1)
        np.testing.assert_allclose(
            sol_a.branch_p, alpha * sol1.branch_p, atol=1e-8
        )
        np.testing.assert_allclose(sol_a.theta, alpha * sol1.theta, atol=1e-8)

        # superposition
        load2 = np.round(rng.uniform(5, 40, len(grid.loads)), 3)
        prod2 = np.array([load2.sum()])
        sol2 = dc.solve_expanded(ex, prod2, load2)
        sol12 = dc.solve_expanded(ex, prod1 + prod2, load1 + load2)
        np.testing.assert_allclose(
            sol12.branch_p, sol1.branch_p + sol2.branch_p, atol=1e-8
        )


# --- islands ------------------------------------------------------------------

def test_fully_connected_is_one_island(grid4):
    part = dc.find_islands(expand_ref(grid4))
    assert part.n_islands == 1
    island = part.islands[0]
    assert island.has_generation and island.has_load and island.has_slack


def test_all_branches_out_is_one_island_per_bus(grid4):
    topo = grid4.reference_topology
    topo.line_status[:] = 0
    part = dc.find_islands(grid_model.expand(grid4, topo))
    assert part.n_islands == 4
    assert [len(i.buses) for i in part.islands] == [1, 1, 1, 1]


def test_crisis_cut_leaves_loads_without_generation(grid4):
    # the cascading sequence of the two-step scenario: line 1-2 trips, then
    # 1-4, 2-4 and 3-4 trip, stranding both consumptions on line 2-3
    topo = grid4.reference_topology
    topo.line_status[:] = [0, 0, 1, 0, 0]
    ex = grid_model.expand(grid4, topo)
    part = dc.find_islands(ex)
    assert part.n_islands == 3
    stranded = [
        isl for isl in part.islands if isl.has_load and not isl.has_generation
    ]
    assert len(stranded) == 1
    assert len(stranded[0].buses) == 2
    solution = dc.solve_expanded(ex, [200.0, 50.0], [100.0, 150.0])
    assert not solution.converged
    assert stranded[0].buses[0] in solution.islands.islands[
        solution.dead_islands[0]
    ].buses


def test_generator_only_island_stays_alive(grid4):
    topo = grid4.reference_topology
    topo.line_status[:] = [0, 1, 1, 1, 1]  # cut substation 1 off? no: 1-2 only
    ex = grid_model.expand(grid4, topo)
    solution = dc.solve_expanded(ex, [200.0, 50.0], [100.0, 150.0])
    assert solution.converged  # still one island, just reduced


# --- backend equivalence --------------------------------------------------------

def test_numpy_fallback_matches_active_backend(grid4):
    ex = expand_ref(grid4)
    mat_active = _kernels.assemble_matrix(
        ex.n_buses, ex.branch_from_bus, ex.branch_to_bus, ex.reactance,
        ex.active.astype(bool),
    )
    mat_numpy = _kernels._assemble_numpy(
        ex.n_buses, ex.branch_from_bus, ex.branch_to_bus, ex.reactance,
        ex.active.astype(bool),
    )
    np.testing.assert_allclose(mat_active, mat_numpy, atol=1e-12)

    p = dc.bus_injections(ex, [150.0, 50.0], [50.0, 150.0]) / 100.0
    labels = np.zeros(ex.n_buses, dtype=np.int64)
    refs = np.array([ex.slack_bus], dtype=np.int64)
    theta_a, sing_a = _kernels.solve_islands(mat_active, p, labels, refs)
    theta_n, sing_n = _kernels._solve_islands_numpy(mat_numpy, p, labels, refs)
    assert not sing_a and not sing_n
    np.testing.assert_allclose(theta_a, theta_n, atol=1e-10)
    theta_s, sing_s = _kernels.solve_islands_sparse(mat_numpy, p, labels, refs)
    assert not sing_s
    np.testing.assert_allclose(theta_s, theta_n, atol=1e-10)
