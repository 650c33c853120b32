"""Interaction library: widget kinds, their compatibility tags, and costs.

Each widget kind carries a complexity score (what it costs to put on the
interface) and a traversal cost (what it costs a human to express one change
with it).  Buttons cost one complexity unit per option, so their effective
complexity grows with the number of endpoint queries they must cover; they
are excluded from the default library because a flat per-traversal cost of 1
would otherwise dominate every more structured widget.
"""

from __future__ import annotations

from dataclasses import dataclass

# Feature tags a transformation group can expose.
VALUE_STRING = "choice:string"   # single-site string/identifier replacement
VALUE_NUMBER = "choice:number"   # single-site number replacement
LITERAL = "literal"              # single-site literal replacement of any kind
TOGGLE = "toggle"                # one subtree present/absent, two variants
COLUMNS = "columns"              # set change over projection clauses
ANY = "any"

WIDGET_COMPATIBILITY = {
    "button": frozenset({ANY}),
    "checkbox": frozenset({TOGGLE}),
    "dropdown": frozenset({VALUE_STRING}),
    "slider": frozenset({VALUE_NUMBER}),
    "textbox": frozenset({LITERAL}),
    "listbox": frozenset({COLUMNS}),
}

# (complexity c_c, traversal cost c_e); button complexity is per option.
DEFAULT_COSTS: dict[str, tuple[float, float]] = {
    "button": (1.0, 1.0),
    "checkbox": (1.0, 1.0),
    "dropdown": (2.0, 2.0),
    "slider": (3.0, 1.5),
    "textbox": (2.0, 4.0),
    "listbox": (3.0, 2.0),
}


@dataclass(frozen=True)
class WidgetKind:
    id: str
    compatible: frozenset[str]
    c_c: float
    c_e: float

    def __post_init__(self):
        if self.c_c <= 0 or self.c_e <= 0:
            raise ValueError("widget costs must be positive")


def make_widget(widget_id: str, c_c: float | None = None,
                c_e: float | None = None) -> WidgetKind:
    if widget_id not in DEFAULT_COSTS:
        raise ValueError(f"unknown widget kind {widget_id!r}")
    default_cc, default_ce = DEFAULT_COSTS[widget_id]
    return WidgetKind(widget_id, WIDGET_COMPATIBILITY[widget_id],
                      default_cc if c_c is None else c_c,
                      default_ce if c_e is None else c_e)


InteractionLibrary = tuple[WidgetKind, ...]


def default_library(include_button: bool = False,
                    overrides: dict[str, dict[str, float]] | None = None,
                    ) -> InteractionLibrary:
    """The standard interaction library, optionally with per-kind cost
    overrides ({kind: {"c_c": x, "c_e": y}})."""
    kinds = ["checkbox", "dropdown", "slider", "textbox", "listbox"]
    if include_button:
        kinds.append("button")
    widgets = []
    for kind in kinds:
        override = (overrides or {}).get(kind, {})
        widgets.append(make_widget(kind, override.get("c_c"), override.get("c_e")))
    return tuple(widgets)


@dataclass(frozen=True)
class CostModel:
    """Budget and objective parameters for the component-mapping problem."""

    s_max: float
    penalty: float | None = None  # None: |nodes| * max c_e * 2 at solve time
    pair_universe: str = "adjacent"  # "adjacent" | "all"

    def __post_init__(self):
        if self.pair_universe not in ("adjacent", "all"):
            raise ValueError(f"unknown pair universe {self.pair_universe!r}")

    def resolve_penalty(self, node_count: int, library: InteractionLibrary) -> float:
        max_ce = max((w.c_e for w in library), default=1.0)
        floor = node_count * max_ce
        if self.penalty is None:
            return floor * 2
        if self.penalty < floor:
            raise ValueError(
                f"penalty {self.penalty} does not dominate the longest possible "
                f"path cost {floor}")
        return self.penalty
