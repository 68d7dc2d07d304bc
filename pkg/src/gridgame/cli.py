"""Command line: run episodes, benchmark agents, dump a debug DC solve,
or serve the session API."""
from __future__ import annotations

import json
import sys

import click
import numpy as np

from . import catalog, chronics, dc_power_flow as dc, grid_model
from .agents import AGENT_KINDS, make_agent
from .environment import EnvConfig
from .errors import GridGameError
from .runner import benchmark as run_benchmark
from .runner import format_table, run_episode


def _load_config(path: str | None) -> EnvConfig:
    if path is None:
        return EnvConfig()
    with open(path, encoding="utf-8") as handle:
        return EnvConfig.from_dict(json.load(handle))


def _parse_seeds(spec: str) -> list[int]:
    if ".." in spec:
        lo, hi = spec.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(tok) for tok in spec.split(",") if tok]


@click.group()
def main():
    """Power-grid operation game."""


@main.command()
@click.option("--case", required=True, help="builtin case name or file path")
@click.option("--chronic", "chronic_name", required=True)
@click.option("--agent", "agent_kind", type=click.Choice(AGENT_KINDS), default="do_nothing")
@click.option("--seed", type=int, default=0)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--log", "log_path", type=click.Path(), default=None,
              help="write the per-step JSONL log here")
@click.option("--table", is_flag=True, help="pretty per-step table instead of JSONL")
def run(case, chronic_name, agent_kind, seed, config_path, log_path, table):
    """Play one chronic with one agent and print the log."""
    try:
        grid = catalog.load_case(case)
        chronic = chronics.load_chronic(chronic_name, grid)
        config = _load_config(config_path)
        agent = make_agent(agent_kind, grid, seed, config=config)
        log = run_episode(grid, chronic, agent, config)
    except GridGameError as exc:
        raise click.ClickException(f"{exc.code}: {exc}") from exc

    if log_path:
        with open(log_path, "w", encoding="utf-8") as handle:
            handle.write(log.to_jsonl() + "\n")
    if table:
        click.echo(f"{'t':>4} {'epoch':>5} {'total':>12} {'overflows':>9} {'done':>5}")
        for rec in log.steps:
            click.echo(
                f"{rec.t:>4} {rec.epoch:>5} {rec.reward['total']:>12.3f} "
                f"{rec.overflow_count:>9} {str(rec.done):>5}"
            )
    else:
        click.echo(log.to_jsonl())
    click.echo(
        f"# G0={log.g0:.6f} steps={len(log.steps)} survived={log.steps_survived} "
        f"epochs={log.epochs_started} game_overs={log.game_overs}",
        err=True,
    )


@main.command("benchmark")
@click.option("--case", required=True)
@click.option("--chronic", "chronic_name", required=True)
@click.option("--agents", "agent_list", default=",".join(AGENT_KINDS),
              help="comma-separated agent kinds")
@click.option("--seeds", default="0..2", help="'1..K' range or comma list")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def benchmark_cmd(case, chronic_name, agent_list, seeds, config_path):
    """Same-context comparison of several agents over several seeds."""
    try:
        grid = catalog.load_case(case)
        chronic = chronics.load_chronic(chronic_name, grid)
        config = _load_config(config_path)
        kinds = [a.strip() for a in agent_list.split(",") if a.strip()]
        rows = run_benchmark(grid, chronic, kinds, _parse_seeds(seeds), config)
    except GridGameError as exc:
        raise click.ClickException(f"{exc.code}: {exc}") from exc
    click.echo(format_table(rows))


@main.command()
@click.option("--case", required=True)
def solve(case):
    """Debug dump: susceptance matrix and DC solution of the case file's
    own injections on the reference topology."""
    try:
        grid = catalog.load_case(case)
    except GridGameError as exc:
        raise click.ClickException(f"{exc.code}: {exc}") from exc
    expanded = grid_model.expand(grid, grid.reference_topology)
    model = dc.assemble(expanded)
    prod = np.array([g.pg for g in grid.generators])
    load = np.array([ld.pd for ld in grid.loads])
    solution = dc.solve(model, dc.bus_injections(expanded, prod, load))

    click.echo(f"case {grid.name}: {grid.n_substations} substations, "
               f"{grid.n_branches} branches, base {grid.base_mva} MVA")
    if model.n_buses <= 12:
        click.echo("susceptance matrix (p.u.):")
        for row in model.b_matrix:
            click.echo("  " + " ".join(f"{v:>10.4f}" for v in row))
    else:
        click.echo(f"susceptance matrix: {model.n_buses}x{model.n_buses}, "
                   f"row-sum max |.| = {np.abs(model.b_matrix.sum(axis=1)).max():.2e}")
    click.echo(f"{'bus':>5} {'theta_rad':>12}")
    for b in range(model.n_buses):
        click.echo(f"{b:>5} {solution.theta[b]:>12.6f}")
    click.echo(f"{'branch':>7} {'from':>5} {'to':>4} {'P_MW':>10} {'limit':>8} {'ratio':>7}")
    for br in grid.branches:
        limit = grid.thermal_limits[br.index]
        ratio = solution.branch_current_proxy[br.index] / limit
        click.echo(
            f"{br.index:>7} {grid.substations[br.from_sub].id:>5} "
            f"{grid.substations[br.to_sub].id:>4} "
            f"{solution.branch_p[br.index]:>10.3f} {limit:>8.1f} {ratio:>7.3f}"
        )


@main.command()
@click.option("--port", type=int, default=8000)
@click.option("--host", default="127.0.0.1")
def serve(port, host):
    """Start the session API (and the UI when built)."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    sys.exit(main())
