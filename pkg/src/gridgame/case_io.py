"""Reader/writer for MATPOWER-style version-2 case files.

The accepted dialect: a `baseMVA` scalar plus `bus`, `gen` and `branch`
matrices assigned to fields of a struct variable. Bus rows carry 13 values,
generator rows 10, branch rows 11 (or 15 when steady-state flow columns are
appended; those are stored but never trusted as physics). Tokenization is
whitespace- and semicolon-tolerant and accepts scientific notation.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from .errors import (
    DanglingReference,
    DuplicateBusId,
    MalformedRow,
    MissingSection,
    MultipleSlackBus,
    NoSlackBus,
)

BUS_COLS = 13
GEN_COLS = 10
BRANCH_COLS = 11
BRANCH_COLS_WITH_FLOWS = 15

# bus columns
BUS_ID, BUS_TYPE, BUS_PD, BUS_QD = 0, 1, 2, 3
# gen columns
GEN_BUS, GEN_PG, GEN_STATUS, GEN_PMAX = 0, 1, 7, 8
# branch columns
BR_FROM, BR_TO, BR_R, BR_X, BR_B, BR_RATE_A, BR_STATUS = 0, 1, 2, 3, 4, 5, 10

SLACK_TYPE = 3
ISOLATED_TYPE = 4


@dataclass(frozen=True)
class RawCase:
    """Validated case-file content, rows kept as plain float tuples."""

    version: str
    base_mva: float
    bus_rows: tuple[tuple[float, ...], ...]
    gen_rows: tuple[tuple[float, ...], ...]
    branch_rows: tuple[tuple[float, ...], ...]
    name: str = "case"
    warnings: tuple[str, ...] = field(default=(), compare=False)

    @property
    def bus_ids(self) -> tuple[int, ...]:
        return tuple(int(r[BUS_ID]) for r in self.bus_rows)

    def with_branch_status(self, index: int, status: int) -> "RawCase":
        rows = list(self.branch_rows)
        row = list(rows[index])
        row[BR_STATUS] = float(status)
        rows[index] = tuple(row)
        return replace(self, branch_rows=tuple(rows))


_SCALAR_RE = re.compile(r"(\w+)\.(\w+)\s*=\s*([^;\[]+);")
_MATRIX_RE = re.compile(r"(\w+)\.(\w+)\s*=\s*\[(.*?)\];", re.S)
_FUNC_RE = re.compile(r"function\s+\w+\s*=\s*(\w+)")


def _parse_rows(section: str, body: str, allowed_widths: tuple[int, ...]):
    rows = []
    for i, chunk in enumerate(body.replace("\n", ";").split(";")):
        tokens = chunk.split()
        if not tokens:
            continue
        try:
            values = tuple(float(t) for t in tokens)
        except ValueError as exc:
            raise MalformedRow(
                f"{section} row {i}: non-numeric token", section=section, row=i
            ) from exc
        if len(values) not in allowed_widths:
            raise MalformedRow(
                f"{section} row {len(rows)}: expected {allowed_widths} columns, "
                f"got {len(values)}",
                section=section,
                row=len(rows),
            )
        rows.append(values)
    return tuple(rows)


def parse_case(text: str, name: str | None = None) -> RawCase:
    """Parse case text into a RawCase, or raise a structured CaseError."""
    stripped = re.sub(r"%.*", "", text)

    func = _FUNC_RE.search(stripped)
    case_name = name or (func.group(1) if func else "case")

    matrices = {}
    for _, key, body in _MATRIX_RE.findall(stripped):
        matrices[key] = body
    scalars = {}
    no_matrices = _MATRIX_RE.sub("", stripped)
    for _, key, value in _SCALAR_RE.findall(no_matrices):
        scalars[key] = value.strip().strip("'\"")

    if "baseMVA" not in scalars:
        raise MissingSection("no baseMVA scalar found", section="baseMVA")
    try:
        base_mva = float(scalars["baseMVA"])
    except ValueError as exc:
        raise MalformedRow("baseMVA is not numeric", section="baseMVA") from exc
    if base_mva <= 0:
        raise MalformedRow("baseMVA must be > 0", section="baseMVA")
    for section in ("bus", "gen", "branch"):
        if section not in matrices:
            raise MissingSection(f"no {section} matrix found", section=section)

    warnings = []
    for key in matrices:
        if key not in ("bus", "gen", "branch"):
            warnings.append(f"ignored section {key!r}")

    bus_rows = _parse_rows("bus", matrices["bus"], (BUS_COLS,))
    gen_rows = _parse_rows("gen", matrices["gen"], (GEN_COLS,))
    branch_rows = _parse_rows(
        "branch", matrices["branch"], (BRANCH_COLS, BRANCH_COLS_WITH_FLOWS)
    )
    if not bus_rows:
        raise MalformedRow("bus matrix is empty", section="bus", row=0)

    seen: set[int] = set()
    for i, row in enumerate(bus_rows):
        bus_id = int(row[BUS_ID])
        if bus_id in seen:
            raise DuplicateBusId(f"bus id {bus_id} repeated", bus=bus_id, row=i)
        seen.add(bus_id)
        if int(row[BUS_TYPE]) not in (1, 2, 3, 4):
            raise MalformedRow(
                f"bus row {i}: type {row[BUS_TYPE]} not in {{1,2,3,4}}",
                section="bus",
                row=i,
            )

    slack_count = sum(1 for r in bus_rows if int(r[BUS_TYPE]) == SLACK_TYPE)
    if slack_count == 0:
        raise NoSlackBus("no type-3 (slack) bus in case")
    if slack_count > 1:
        raise MultipleSlackBus(f"{slack_count} type-3 buses in case")

    for i, row in enumerate(gen_rows):
        if int(row[GEN_BUS]) not in seen:
            raise DanglingReference(
                f"gen row {i} references unknown bus {int(row[GEN_BUS])}",
                section="gen",
                row=i,
            )
        if row[GEN_STATUS] < 0:
            raise MalformedRow(
                f"gen row {i}: status must be >= 0", section="gen", row=i
            )
    for i, row in enumerate(branch_rows):
        for col in (BR_FROM, BR_TO):
            if int(row[col]) not in seen:
                raise DanglingReference(
                    f"branch row {i} references unknown bus {int(row[col])}",
                    section="branch",
                    row=i,
                )
        if int(row[BR_STATUS]) not in (0, 1):
            raise MalformedRow(
                f"branch row {i}: status must be 0 or 1", section="branch", row=i
            )

    return RawCase(
        version=str(scalars.get("version", "2")),
        base_mva=base_mva,
        bus_rows=bus_rows,
        gen_rows=gen_rows,
        branch_rows=branch_rows,
        name=case_name,
        warnings=tuple(warnings),
    )


def _fmt(value: float) -> str:
    if float(value).is_integer():
        return str(int(value))
    return repr(float(value))


def serialize_case(case: RawCase) -> str:
    """Write a RawCase back to case text; parse(serialize(c)) == c."""
    out = [f"function mpc = {case.name}"]
    out.append(f"mpc.version = '{case.version}';")
    out.append(f"mpc.baseMVA = {_fmt(case.base_mva)};")
    for section, rows in (
        ("bus", case.bus_rows),
        ("gen", case.gen_rows),
        ("branch", case.branch_rows),
    ):
        out.append(f"mpc.{section} = [")
        for row in rows:
            out.append("\t" + "\t".join(_fmt(v) for v in row) + ";")
        out.append("];")
    return "\n".join(out) + "\n"
