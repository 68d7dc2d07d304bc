"""Injection schedules: the productions/consumptions loaded at each step.

CSV format, one row per timestep, header columns prod_p_<busid>,
load_p_<busid>, load_q_<busid> named after the case's bus ids. In DC mode
total production must equal total consumption on every row.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import ImbalanceError, LengthMismatch, UnknownChronic
from .grid_model import GridCase

BALANCE_TOL_MW = 1e-6

BUILTIN_CHRONICS = {
    "case4gs-crisis": "data/chronics/case4gs-crisis.csv",
    "case4gs-relief": "data/chronics/case4gs-relief.csv",
    "case118-nominal": "data/chronics/case118-nominal.csv",
}


@dataclass(frozen=True)
class InjectionSet:
    prod_p: np.ndarray  # MW per generator
    load_p: np.ndarray  # MW per load
    load_q: np.ndarray  # MVAr per load, zero in DC mode

    def __post_init__(self):
        for name in ("prod_p", "load_p", "load_q"):
            object.__setattr__(
                self, name, np.asarray(getattr(self, name), dtype=float)
            )


@dataclass
class Chronic:
    grid_id: str
    steps: tuple[InjectionSet, ...]
    cursor: int = 0
    interval_label: str | None = None

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def remaining(self) -> int:
        return len(self.steps) - self.cursor

    def next(self) -> InjectionSet | None:
        """Next injection set, or None once exhausted. The cursor never
        rewinds; an environment game-over does not reset it."""
        if self.cursor >= len(self.steps):
            return None
        out = self.steps[self.cursor]
        self.cursor += 1
        return out

    def reload(self) -> "Chronic":
        """Fresh iterator over the same steps."""
        return Chronic(self.grid_id, self.steps, 0, self.interval_label)


def _column(header: list[str], row: list[str], name: str, t: int) -> float:
    try:
        return float(row[header.index(name)])
    except ValueError as exc:
        raise LengthMismatch(
            f"row {t}: column {name} is not numeric", timestep=t
        ) from exc


def parse_chronic_csv(text: str, grid: GridCase, grid_id: str) -> Chronic:
    reader = csv.reader(io.StringIO(text))
    rows = [r for r in reader if r and any(tok.strip() for tok in r)]
    if not rows:
        return Chronic(grid_id=grid_id, steps=())
    header = [h.strip() for h in rows[0]]

    gen_buses = [g.bus_id for g in grid.generators]
    if len(set(gen_buses)) != len(gen_buses):
        raise LengthMismatch(
            "case has several generators on one bus; chronic columns would "
            "be ambiguous"
        )
    prod_cols = [f"prod_p_{b}" for b in gen_buses]
    loadp_cols = [f"load_p_{ld.bus_id}" for ld in grid.loads]
    loadq_cols = [f"load_q_{ld.bus_id}" for ld in grid.loads]
    for col in (*prod_cols, *loadp_cols, *loadq_cols):
        if col not in header:
            raise LengthMismatch(f"missing column {col}")

    steps = []
    for t, row in enumerate(rows[1:]):
        if len(row) != len(header):
            raise LengthMismatch(
                f"row {t}: {len(row)} cells for {len(header)} columns",
                timestep=t,
            )
        prod = np.array([_column(header, row, c, t) for c in prod_cols])
        loadp = np.array([_column(header, row, c, t) for c in loadp_cols])
        loadq = np.array([_column(header, row, c, t) for c in loadq_cols])
        residual = float(prod.sum() - loadp.sum())
        if abs(residual) > BALANCE_TOL_MW:
            raise ImbalanceError(
                f"row {t}: production minus consumption is {residual:+.6g} MW",
                timestep=t,
                residual=residual,
            )
        steps.append(InjectionSet(prod, loadp, loadq))
    return Chronic(grid_id=grid_id, steps=tuple(steps))


def load_chronic(source: str, grid: GridCase) -> Chronic:
    """Load a chronic by builtin name or CSV file path."""
    if source in BUILTIN_CHRONICS:
        text = (
            resources.files("gridgame") / BUILTIN_CHRONICS[source]
        ).read_text()
        return parse_chronic_csv(text, grid, grid_id=source)
    try:
        with open(source, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise UnknownChronic(
            f"{source!r} is neither a builtin chronic nor a readable file"
        ) from exc
    return parse_chronic_csv(text, grid, grid_id=source)


def builtin_chronics_for(case_name: str) -> list[str]:
    prefix = f"{case_name}-"
    return sorted(n for n in BUILTIN_CHRONICS if n.startswith(prefix))
