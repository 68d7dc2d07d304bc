"""Generate the bundled 118-substation fixture: case file, nominal chronic
and drawing layout.

Deterministic (seeded); rerunning reproduces the committed artifacts. The
grid is sized like the classic 118-bus transmission case: 118 substations,
56 productions, 99 consumptions, 186 branches, one 14-element substation
(12 branch ends + generator + load), bus 69 as slack. Thermal limits are
sized from the base-case DC flows with a 35% margin so the nominal chronic
is survivable without action.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from gridgame import case_io, chronics, dc_power_flow as dc, grid_model

OUT = Path(__file__).resolve().parents[1] / "src" / "gridgame" / "data"
N_BUS, N_BRANCH, N_GEN, N_LOAD = 118, 186, 56, 99
SLACK_ID = 69
SEED = 118


def element_profile() -> list[int]:
    profile = [14, 11, 10, 9, 8, 8, 7, 7, 7, 7] + [6] * 8 + [5] * 18
    profile += [4] * 65 + [3] * 7 + [2] * 10
    assert len(profile) == N_BUS and sum(profile) == 2 * N_BRANCH + N_GEN + N_LOAD
    return profile


def realize_graph(rng, degrees):
    """Connected multigraph (no self-loops) matching the degree sequence."""
    residual = np.array(degrees, dtype=int)
    order = rng.permutation(N_BUS)
    edges = []
    added = [int(order[0])]
    for node in order[1:]:
        node = int(node)
        candidates = [b for b in added if residual[b] > 0]
        parent = int(rng.choice(candidates))
        edges.append((parent, node))
        residual[parent] -= 1
        residual[node] -= 1
        added.append(node)

    stubs = [b for b in range(N_BUS) for _ in range(residual[b])]
    for attempt in range(1000):
        rng.shuffle(stubs)
        if all(stubs[i] != stubs[i + 1] for i in range(0, len(stubs), 2)):
            break
    else:
        raise RuntimeError("could not pair stubs without self-loops")
    edges.extend(
        (stubs[i], stubs[i + 1]) for i in range(0, len(stubs), 2)
    )
    assert len(edges) == N_BRANCH
    return edges


def main() -> None:
    rng = np.random.default_rng(SEED)
    elems = element_profile()

    # attachments: generators on the 56 largest substations, loads on the
    # 99 largest; the leftovers are pure junctions
    has_gen = [i < N_GEN for i in range(N_BUS)]
    has_load = [i < N_LOAD for i in range(N_BUS)]
    degrees = [
        elems[i] - int(has_gen[i]) - int(has_load[i]) for i in range(N_BUS)
    ]
    assert min(degrees) >= 1 and sum(degrees) == 2 * N_BRANCH

    edges = realize_graph(rng, degrees)

    # public bus ids: seeded permutation of 1..118, then force the largest
    # generator onto id 69 (the slack)
    ids = rng.permutation(np.arange(1, N_BUS + 1))

    load_p = np.round(rng.uniform(15.0, 70.0, N_LOAD), 1)
    pmax = np.round(rng.uniform(80.0, 420.0, N_GEN), 0)
    total_load = load_p.sum()
    pg = np.round(pmax * total_load / pmax.sum(), 1)
    pg[0] += round(total_load - pg.sum(), 6)
    slack_rank = 0  # rank 0 holds the largest substation and a generator
    old_pos = int(np.flatnonzero(ids == SLACK_ID)[0])
    ids[old_pos] = ids[slack_rank]
    ids[slack_rank] = SLACK_ID

    x = np.round(rng.uniform(0.02, 0.15, N_BRANCH), 5)
    r = np.round(x / 10.0, 6)
    b = np.round(x / 2.0, 5)

    bus_rows = []
    for i in range(N_BUS):
        btype = 3 if i == slack_rank else (2 if has_gen[i] else 1)
        pd = load_p[i] if has_load[i] else 0.0
        bus_rows.append(
            (float(ids[i]), float(btype), float(pd), 0.0, 0.0, 0.0, 1.0,
             1.0, 0.0, 138.0, 1.0, 1.06, 0.94)
        )
    gen_rows = []
    for g in range(N_GEN):
        gen_rows.append(
            (float(ids[g]), float(pg[g]), 0.0, 100.0, -100.0, 1.0, 100.0,
             1.0, float(pmax[g]), 0.0)
        )
    branch_rows = []
    for e, (f, t) in enumerate(edges):
        branch_rows.append(
            (float(ids[f]), float(ids[t]), float(r[e]), float(x[e]),
             float(b[e]), 0.0, 0.0, 0.0, 0.0, 0.0, 1.0)
        )

    case = case_io.RawCase(
        version="2",
        base_mva=100.0,
        bus_rows=tuple(bus_rows),
        gen_rows=tuple(gen_rows),
        branch_rows=tuple(branch_rows),
        name="case118",
    )
    grid = grid_model.build_grid(case)

    # thermal limits from the base-case flows, 35% margin, 5 MW floor steps
    expanded = grid_model.expand(grid, grid.reference_topology)
    solution = dc.solve_expanded(
        expanded,
        np.array([g.pg for g in grid.generators]),
        np.array([ld.pd for ld in grid.loads]),
    )
    assert solution.converged
    rate = np.maximum(np.ceil(1.35 * np.abs(solution.branch_p) / 5) * 5, 40.0)
    branch_rows = [
        row[:5] + (float(rate[e]),) + row[6:] for e, row in enumerate(branch_rows)
    ]
    case = case_io.RawCase(
        version="2",
        base_mva=100.0,
        bus_rows=tuple(bus_rows),
        gen_rows=tuple(gen_rows),
        branch_rows=tuple(branch_rows),
        name="case118",
    )
    (OUT / "case118.m").write_text(case_io.serialize_case(case))

    # sanity gates on the artifact
    grid = grid_model.build_grid(case_io.parse_case((OUT / "case118.m").read_text()))
    counts = [s.n_elements for s in grid.substations]
    onehot_total = sum(s.n_configurations for s in grid.substations)
    partition = dc.find_islands(grid_model.expand(grid, grid.reference_topology))
    assert grid.n_substations == N_BUS and grid.n_branches == N_BRANCH
    assert len(grid.generators) == N_GEN and len(grid.loads) == N_LOAD
    assert counts.count(14) == 1 and max(counts) == 14
    assert 8000 <= onehot_total <= 12000, onehot_total
    assert partition.n_islands == 1
    print(f"case118: one-hot total {onehot_total}, "
          f"max rate {rate.max():.0f} MW, total load {total_load:.1f} MW")

    # 50-step nominal chronic: smooth load swings, productions rescaled to
    # balance exactly
    steps = 50
    lines = []
    gen_buses = [g.bus_id for g in grid.generators]
    load_buses = [ld.bus_id for ld in grid.loads]
    header = (
        [f"prod_p_{b}" for b in gen_buses]
        + [f"load_p_{b}" for b in load_buses]
        + [f"load_q_{b}" for b in load_buses]
    )
    lines.append(",".join(header))
    base_pd = np.array([ld.pd for ld in grid.loads])
    base_pg = np.array([g.pg for g in grid.generators])
    for t in range(steps):
        swing = 1.0 + 0.08 * np.sin(2 * np.pi * t / steps)
        noise = rng.uniform(0.98, 1.02, N_LOAD)
        loads_t = np.round(base_pd * swing * noise, 3)
        prods_t = np.round(base_pg * loads_t.sum() / base_pg.sum(), 3)
        prods_t[0] += loads_t.sum() - prods_t.sum()
        row = (
            [repr(float(v)) for v in prods_t]
            + [repr(float(v)) for v in loads_t]
            + ["0"] * N_LOAD
        )
        lines.append(",".join(row))
    (OUT / "chronics" / "case118-nominal.csv").write_text("\n".join(lines) + "\n")

    chronic = chronics.parse_chronic_csv(
        (OUT / "chronics" / "case118-nominal.csv").read_text(), grid, "case118-nominal"
    )
    assert len(chronic) == steps

    # drawing layout via a seeded force layout
    import networkx as nx

    g = nx.MultiGraph()
    g.add_nodes_from(range(N_BUS))
    g.add_edges_from(edges)
    pos = nx.spring_layout(g, seed=SEED, iterations=200)
    xy = np.array([pos[i] for i in range(N_BUS)])
    xy = (xy - xy.min(axis=0)) / (xy.max(axis=0) - xy.min(axis=0))
    layout = {
        "case": "case118",
        "substations": [
            {"id": int(ids[i]), "x": round(float(xy[i, 0]), 4),
             "y": round(float(xy[i, 1]), 4)}
            for i in range(N_BUS)
        ],
        "branches": [
            {"from": int(ids[f]), "to": int(ids[t])} for f, t in edges
        ],
    }
    (OUT / "layouts" / "case118.json").write_text(
        json.dumps(layout, indent=1) + "\n"
    )
    print("wrote case118.m, case118-nominal.csv, case118.json")


if __name__ == "__main__":
    main()
