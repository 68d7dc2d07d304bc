"""Timing comparison of the numba kernels against the pure-numpy fallback.

Runs the same workloads in two subprocesses (GRIDGAME_BACKEND=numba|numpy)
so each interpreter binds its backend cleanly at import:

  solve     repeated assemble+solve of the 118-substation reference grid
  greedy    one greedy step = 186 what-if cascades on the same grid

Usage: python benchmarks/compare_backends.py [--repeat N]
"""
from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
from pathlib import Path

WORKER = r"""
import json, os, time
import numpy as np
from gridgame import catalog, chronics
from gridgame import dc_power_flow as dc, grid_model
from gridgame._kernels import BACKEND
from gridgame.agents import make_agent
from gridgame.environment import Environment

repeat = int(os.environ["BENCH_REPEAT"])
grid = catalog.load_case("case118")
chronic = chronics.load_chronic("case118-nominal", grid)
expanded = grid_model.expand(grid, grid.reference_topology)
prod = np.array([g.pg for g in grid.generators])
load = np.array([ld.pd for ld in grid.loads])

dc.solve_expanded(expanded, prod, load)  # JIT warmup outside the timing
start = time.perf_counter()
for _ in range(repeat):
    dc.solve_expanded(expanded, prod, load)
solve_s = (time.perf_counter() - start) / repeat

env = Environment(grid)
env.reset(chronic.next())
agent = make_agent("greedy_line", grid, 0)
obs = env.observe()
agent.act(obs, env)  # warmup
start = time.perf_counter()
agent.act(obs, env)
greedy_s = time.perf_counter() - start

print(json.dumps({"backend": BACKEND, "solve_s": solve_s, "greedy_s": greedy_s}))
"""


def run_backend(backend: str, repeat: int) -> dict:
    env = dict(os.environ)
    env["GRIDGAME_BACKEND"] = backend
    env["BENCH_REPEAT"] = str(repeat)
    out = subprocess.run(
        [sys.executable, "-c", WORKER],
        env=env,
        capture_output=True,
        text=True,
        check=True,
        cwd=Path(__file__).resolve().parents[1],
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=200)
    args = parser.parse_args()

    rows = [run_backend(b, args.repeat) for b in ("numpy", "numba")]
    print(f"{'backend':<8} {'solve (ms)':>12} {'greedy step (ms)':>18}")
    for row in rows:
        print(
            f"{row['backend']:<8} {1e3 * row['solve_s']:>12.3f} "
            f"{1e3 * row['greedy_s']:>18.1f}"
        )
    numpy_row, numba_row = rows
    print(
        f"speedup: solve x{numpy_row['solve_s'] / numba_row['solve_s']:.2f}, "
        f"greedy x{numpy_row['greedy_s'] / numba_row['greedy_s']:.2f}"
    )


if __name__ == "__main__":
    main()
