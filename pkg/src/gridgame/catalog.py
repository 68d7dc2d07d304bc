"""Registry of bundled cases, chronics and drawing layouts."""
from __future__ import annotations

import json
from importlib import resources

from .case_io import parse_case
from .errors import UnknownCase
from .grid_model import GridCase, build_grid

BUILTIN_CASES = {
    "case4gs": "data/case4gs.m",
    "case118": "data/case118.m",
}
LAYOUTS = {
    "case4gs": "data/layouts/case4gs.json",
    "case118": "data/layouts/case118.json",
}


def builtin_case_names() -> list[str]:
    return sorted(BUILTIN_CASES)


def load_case(source: str) -> GridCase:
    """Build a grid from a builtin case name or a case file path."""
    if source in BUILTIN_CASES:
        text = (resources.files("gridgame") / BUILTIN_CASES[source]).read_text()
        return build_grid(parse_case(text, name=source))
    try:
        with open(source, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise UnknownCase(
            f"{source!r} is neither a builtin case nor a readable file"
        ) from exc
    return build_grid(parse_case(text))


def layout_for(case_name: str) -> dict | None:
    """Drawing coordinates for the UI; presentation data, never physics."""
    if case_name not in LAYOUTS:
        return None
    return json.loads(
        (resources.files("gridgame") / LAYOUTS[case_name]).read_text()
    )
