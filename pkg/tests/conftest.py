from __future__ import annotations

import numpy as np
import pytest

from gridgame import case_io, catalog, chronics, grid_model


@pytest.fixture(scope="session")
def case4gs_text() -> str:
    from importlib import resources

    return (resources.files("gridgame") / "data/case4gs.m").read_text()


@pytest.fixture(scope="session")
def case118_text() -> str:
    from importlib import resources

    return (resources.files("gridgame") / "data/case118.m").read_text()


@pytest.fixture(scope="session")
def grid4(case4gs_text) -> grid_model.GridCase:
    return grid_model.build_grid(case_io.parse_case(case4gs_text, name="case4gs"))


@pytest.fixture(scope="session")
def grid118() -> grid_model.GridCase:
    return catalog.load_case("case118")


@pytest.fixture()
def crisis(grid4) -> chronics.Chronic:
    return chronics.load_chronic("case4gs-crisis", grid4)


def make_toy_case(
    bus_rows, gen_rows, branch_rows, base_mva=100.0, name="toy"
) -> case_io.RawCase:
    return case_io.parse_case(toy_case_text(bus_rows, gen_rows, branch_rows, base_mva, name))


def toy_case_text(bus_rows, gen_rows, branch_rows, base_mva=100.0, name="toy") -> str:
    def block(rows):
        return "\n".join("\t" + "\t".join(str(v) for v in row) + ";" for row in rows)

    return (
        f"function mpc = {name}\n"
        "mpc.version = '2';\n"
        f"mpc.baseMVA = {base_mva};\n"
        f"mpc.bus = [\n{block(bus_rows)}\n];\n"
        f"mpc.gen = [\n{block(gen_rows)}\n];\n"
        f"mpc.branch = [\n{block(branch_rows)}\n];\n"
    )


def bus_row(bus_id, btype, pd=0.0, qd=0.0):
    return [bus_id, btype, pd, qd, 0, 0, 1, 1, 0, 230, 1, 1.1, 0.9]


def gen_row(bus_id, pg, pmax=500.0, status=1):
    return [bus_id, pg, 0, 100, -100, 1, 100, status, pmax, 0]


def branch_row(f, t, x, rate=100.0, status=1):
    return [f, t, x / 10.0, x, 0.0, rate, rate, rate, 0, 0, status]


@pytest.fixture(scope="session")
def two_bus_grid() -> grid_model.GridCase:
    """bus 1: generator, bus 2: slack + load, one branch x=1.0 p.u."""
    case = make_toy_case(
        [bus_row(1, 2), bus_row(2, 3, pd=100.0)],
        [gen_row(1, 100.0)],
        [branch_row(1, 2, 1.0)],
    )
    return grid_model.build_grid(case)


@pytest.fixture(scope="session")
def ring3_grid() -> grid_model.GridCase:
    """Symmetric 3-bus ring, equal reactances, gen at 1, load at 2."""
    case = make_toy_case(
        [bus_row(1, 2), bus_row(2, 1, pd=100.0), bus_row(3, 3)],
        [gen_row(1, 100.0)],
        [branch_row(1, 2, 0.1), branch_row(1, 3, 0.1), branch_row(2, 3, 0.1)],
    )
    return grid_model.build_grid(case)


def random_connected_case(rng: np.random.Generator, n_buses: int) -> case_io.RawCase:
    """Random connected grid with a gen at bus 1 (slack) and loads elsewhere.

    Every bus ends up with >= 2 elements: a spanning tree plus extra edges
    gives >= 1 branch end per bus, and every bus hosts a gen or load.
    """
    edges = []
    for b in range(2, n_buses + 1):
        edges.append((int(rng.integers(1, b)), b))
    extra = int(rng.integers(1, n_buses))
    for _ in range(extra):
        f = int(rng.integers(1, n_buses + 1))
        t = int(rng.integers(1, n_buses + 1))
        if f != t:
            edges.append((min(f, t), max(f, t)))
    loads = [round(float(rng.uniform(10, 60)), 3) for _ in range(n_buses - 1)]
    buses = [bus_row(1, 3)] + [
        bus_row(b, 1, pd=loads[b - 2]) for b in range(2, n_buses + 1)
    ]
    gens = [gen_row(1, round(sum(loads), 3))]
    branches = [
        branch_row(f, t, round(float(rng.uniform(0.02, 0.4)), 5))
        for f, t in edges
    ]
    return make_toy_case(buses, gens, branches)
