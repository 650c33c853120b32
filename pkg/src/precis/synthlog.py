"""Synthetic query logs built from planted widget templates.

Each cluster fixes a base query shape with a few mutable slots (a string
filter, a numeric threshold, a TOP toggle, a column set); a random walk
changes one slot per step and emits the query after every move.  Because the
slots are known, the interface the pipeline should recover is known too,
which makes these logs ground truth for coverage experiments.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .ast import SourceQuery
from .pilang import StatementLibrary, parse_library
from .sqlparser import parse_query

STANDARD_STATEMENTS = """\
// one string literal changed inside an equality filter
FROM where//expr[op="="]//strliteral AS T
WHERE T@old not equal T@new AND |T| = 1
MATCH change_where_equal

// one numeric threshold changed in the filter
FROM where//expr//numliteral AS N
WHERE N@old not equal N@new AND |N| = 1
MATCH change_where_number

// one numeric bound changed in the HAVING clause
FROM having//expr//numliteral AS N
WHERE N@old not equal N@new AND |N| = 1
MATCH change_having_number

// the TOP row limit appeared, disappeared or changed
FROM topclause AS T
WHERE T@old not equal T@new
MATCH top_toggle

// the projected column set changed
FROM project//projectclause AS cols
WHERE cols@old not equal cols@new
MATCH columns_changed

// the queried table changed
FROM from//tableclause//tablename AS T
WHERE T@old not equal T@new AND |T| = 1
MATCH change_table
"""


def standard_library(labels: list[str] | None = None) -> StatementLibrary:
    library = parse_library(STANDARD_STATEMENTS)
    if labels is None:
        return library
    return StatementLibrary(tuple(s for s in library if s.label in labels))


@dataclass(frozen=True)
class ClusterSpec:
    """One planted task: a base query over `table` with optional slots."""

    table: str
    filter_column: str = "country"
    filter_values: tuple[str, ...] = ()     # dropdown slot when len >= 2
    threshold_column: str = "amount"
    threshold_values: tuple[str, ...] = ()  # slider slot when len >= 2
    top_toggle: bool = False                # checkbox slot
    column_sets: tuple[tuple[str, ...], ...] = ()  # listbox slot when len >= 2

    def slot_count(self) -> int:
        return sum((len(self.filter_values) >= 2,
                    len(self.threshold_values) >= 2,
                    self.top_toggle,
                    len(self.column_sets) >= 2))


@dataclass
class ClusterState:
    filter_index: int = 0
    threshold_index: int = 0
    top_on: bool = False
    columns_index: int = 0


def render_query(spec: ClusterSpec, state: ClusterState) -> str:
    if len(spec.column_sets) >= 2:
        select_list = ", ".join(spec.column_sets[state.columns_index])
    else:
        select_list = "*"
    parts = ["SELECT"]
    if spec.top_toggle and state.top_on:
        parts.append("TOP 5")
    parts.append(select_list)
    parts.append(f"FROM {spec.table}")
    conditions = []
    if len(spec.filter_values) >= 2:
        conditions.append(f"{spec.filter_column} = '{spec.filter_values[state.filter_index]}'")
    if len(spec.threshold_values) >= 2:
        conditions.append(f"{spec.threshold_column} > {spec.threshold_values[state.threshold_index]}")
    if conditions:
        parts.append("WHERE " + " AND ".join(conditions))
    return " ".join(parts)


def _mutations(spec: ClusterSpec, state: ClusterState) -> list[ClusterState]:
    out = []
    if len(spec.filter_values) >= 2:
        for i in range(len(spec.filter_values)):
            if i != state.filter_index:
                out.append(ClusterState(i, state.threshold_index, state.top_on,
                                        state.columns_index))
    if len(spec.threshold_values) >= 2:
        for i in range(len(spec.threshold_values)):
            if i != state.threshold_index:
                out.append(ClusterState(state.filter_index, i, state.top_on,
                                        state.columns_index))
    if spec.top_toggle:
        out.append(ClusterState(state.filter_index, state.threshold_index,
                                not state.top_on, state.columns_index))
    if len(spec.column_sets) >= 2:
        for i in range(len(spec.column_sets)):
            if i != state.columns_index:
                out.append(ClusterState(state.filter_index, state.threshold_index,
                                        state.top_on, i))
    return out


@dataclass
class SyntheticLog:
    sources: list[str]
    clusters: list[ClusterSpec]
    distinct_per_cluster: list[int] = field(default_factory=list)

    def entries(self):
        return [(SourceQuery(text, i), parse_query(text))
                for i, text in enumerate(self.sources)]

    def text(self) -> str:
        return ";\n".join(self.sources) + ";\n"


def generate_log(clusters: list[ClusterSpec], steps_per_cluster: int,
                 rng: random.Random) -> SyntheticLog:
    """Random-walk a log: one slot changes per step, the query is emitted
    after every move, and every slot value is visited at least once so the
    planted widget domains are fully observable."""
    sources: list[str] = []
    distinct_counts: list[int] = []
    for spec in clusters:
        state = ClusterState()
        seen = {render_query(spec, state)}
        sources.append(render_query(spec, state))
        pending = _coverage_walk(spec)
        moves = 0
        while pending or moves < steps_per_cluster:
            if pending:
                state = pending.pop(0)
            else:
                options = _mutations(spec, state)
                if not options:
                    break
                state = rng.choice(options)
            text = render_query(spec, state)
            sources.append(text)
            seen.add(text)
            moves += 1
        distinct_counts.append(len(seen))
    return SyntheticLog(sources, list(clusters), distinct_counts)


def _coverage_walk(spec: ClusterSpec) -> list[ClusterState]:
    """A deterministic state sequence that changes one slot at a time and
    visits every value of every slot."""
    walk: list[ClusterState] = []
    state = ClusterState()
    for i in range(1, len(spec.filter_values)):
        state = ClusterState(i, state.threshold_index, state.top_on, state.columns_index)
        walk.append(state)
    for i in range(1, len(spec.threshold_values)):
        state = ClusterState(state.filter_index, i, state.top_on, state.columns_index)
        walk.append(state)
    if spec.top_toggle:
        state = ClusterState(state.filter_index, state.threshold_index, True,
                             state.columns_index)
        walk.append(state)
    for i in range(1, len(spec.column_sets)):
        state = ClusterState(state.filter_index, state.threshold_index, state.top_on, i)
        walk.append(state)
    return walk
