"""Graph mining: pairing strategies, dedup, determinism, export formats.

Brute-force oracles re-evaluate statements over raw ordered pairs so the
miner's bookkeeping is checked against first principles.
"""

from __future__ import annotations

import pytest

from precis.ast import SourceQuery
from precis.errors import SchemaError
from precis.miner import (
    MiningConfig,
    connected_components,
    edge_color,
    export_graph,
    import_graph,
    mine,
)
from precis.pilang import StatementLibrary, evaluate, parse_library
from precis.sqlparser import parse_log, parse_query

from conftest import Q1, Q2, Q3, Q4
from test_pilang import CHANGE_WHERE_EQUAL, TOP5_TOGGLE

FIG_LIBRARY = parse_library(CHANGE_WHERE_EQUAL.strip() + "\n\n" + TOP5_TOGGLE.strip())

NUMBER_CHANGE = """
FROM where//expr//numliteral AS N
WHERE N@old not equal N@new AND |N| = 1
MATCH change_where_number
"""


def make_log(sources: list[str]):
    return [(SourceQuery(text, i), parse_query(text)) for i, text in enumerate(sources)]


def brute_force_edges(sources, library) -> set[tuple[int, int, str]]:
    """Oracle: evaluate every statement over every ordered pair of distinct
    queries, by index into the distinct-query list."""
    asts = [parse_query(s) for s in sources]
    distinct = []
    for ast in asts:
        if all(ast.canonical_key != d.canonical_key for d in distinct):
            distinct.append(ast)
    found = set()
    for i, a in enumerate(distinct):
        for j, b in enumerate(distinct):
            if a.canonical_key == b.canonical_key:
                continue
            for stmt in library:
                if evaluate(stmt, a, b) is not None:
                    found.add((i, j, stmt.label))
    return found


class TestMine:
    def test_fig_log_all_pairs(self):
        graph = mine(make_log([Q1, Q2, Q3, Q4]), FIG_LIBRARY, MiningConfig("all"))
        assert len(graph.nodes) == 4
        assert len(graph.edges) == 4
        labels = sorted(e.label for e in graph.edges)
        assert labels == ["change_where_equal", "change_where_equal",
                          "top5_toggle", "top5_toggle"]
        pairs = {(e.src, e.dst): e.label for e in graph.edges}
        k1, k2, k3, k4 = (parse_query(q).canonical_key for q in (Q1, Q2, Q3, Q4))
        assert pairs[(k1, k2)] == "change_where_equal"
        assert pairs[(k2, k1)] == "change_where_equal"
        assert pairs[(k3, k4)] == "top5_toggle"
        assert pairs[(k4, k3)] == "top5_toggle"
        assert len(connected_components(graph)) == 2

    def test_single_query_log(self):
        graph = mine(make_log([Q1]), FIG_LIBRARY, MiningConfig("all"))
        assert len(graph.nodes) == 1 and graph.edges == []

    def test_numeric_clique(self):
        sources = [f"SELECT * FROM T WHERE x > {v}" for v in (10, 20, 30, 40, 50)]
        library = parse_library(NUMBER_CHANGE)
        adjacent = mine(make_log(sources), library, MiningConfig("adjacent"))
        assert len(adjacent.edges) == 8  # 4 forward + 4 reverse
        all_pairs = mine(make_log(sources), library, MiningConfig("all"))
        assert len(all_pairs.edges) == 20
        oracle = brute_force_edges(sources, library)
        assert len(oracle) == 20

    def test_dedup_multiplicity(self):
        sources = [Q1, Q2, Q1, Q1, Q3]
        graph = mine(make_log(sources), FIG_LIBRARY, MiningConfig("all"))
        assert len(graph.nodes) == 3
        assert sum(n.multiplicity for n in graph.nodes.values()) == 5
        k1 = parse_query(Q1).canonical_key
        assert graph.nodes[k1].log_indexes == [0, 2, 3]

    def test_determinism(self):
        log = make_log([Q1, Q2, Q3, Q4])
        a = export_graph(mine(log, FIG_LIBRARY, MiningConfig("all")), "json")
        b = export_graph(mine(log, FIG_LIBRARY, MiningConfig("all")), "json")
        assert a == b

    def test_library_monotonicity(self):
        log = make_log([Q1, Q2, Q3, Q4])
        small = parse_library(CHANGE_WHERE_EQUAL)
        large = FIG_LIBRARY
        edges_small = {e.identity() for e in mine(log, small, MiningConfig("all")).edges}
        edges_large = {e.identity() for e in mine(log, large, MiningConfig("all")).edges}
        assert edges_small <= edges_large

    def test_pairing_inclusion_chain(self):
        sources = [f"SELECT * FROM T WHERE x > {v}" for v in (1, 2, 3, 4)]
        library = parse_library(NUMBER_CHANGE)
        log = make_log(sources)
        adjacent = {e.identity() for e in mine(log, library, MiningConfig("adjacent")).edges}
        window2 = {e.identity() for e in
                   mine(log, library, MiningConfig("window", window=2)).edges}
        all_pairs = {e.identity() for e in mine(log, library, MiningConfig("all")).edges}
        assert adjacent <= window2 <= all_pairs
        assert len(adjacent) < len(window2) < len(all_pairs)

    def test_no_self_loops(self):
        graph = mine(make_log([Q1, Q1, Q2]), FIG_LIBRARY, MiningConfig("all"))
        assert all(e.src != e.dst for e in graph.edges)

    def test_empty_library_gives_edgeless_graph(self):
        graph = mine(make_log([Q1, Q2]), StatementLibrary(()), MiningConfig("all"))
        assert len(graph.nodes) == 2 and graph.edges == []

    def test_auto_pairing_small_log_is_all_pairs(self):
        sources = [f"SELECT * FROM T WHERE x > {v}" for v in (1, 2, 3)]
        library = parse_library(NUMBER_CHANGE)
        auto = mine(make_log(sources), library, MiningConfig())
        assert len(auto.edges) == 6


class TestExport:
    def test_dot_colors(self):
        graph = mine(make_log([Q1, Q2, Q3, Q4]), FIG_LIBRARY, MiningConfig("all"))
        by_label = {e.label: e for e in graph.edges}
        assert edge_color(by_label["change_where_equal"]) == "red"
        assert edge_color(by_label["top5_toggle"]) == "gray"
        dot = export_graph(graph, "dot")
        assert dot.count("color=red") == 2
        assert dot.count("color=gray") == 2
        assert dot.startswith("digraph")

    def test_project_edges_are_blue(self):
        from test_pilang import COLUMN_REMOVED
        library = parse_library(COLUMN_REMOVED)
        graph = mine(make_log(["SELECT region, revenue FROM clients",
                               "SELECT revenue FROM clients"]),
                     library, MiningConfig("all"))
        assert graph.edges and all(edge_color(e) == "blue" for e in graph.edges)

    def test_dot_with_no_edges(self):
        graph = mine(make_log([Q1]), FIG_LIBRARY, MiningConfig("all"))
        dot = export_graph(graph, "dot")
        assert "->" not in dot and "n0" in dot

    def test_json_round_trip(self):
        graph = mine(make_log([Q1, Q2, Q3, Q4]), FIG_LIBRARY, MiningConfig("all"))
        text = export_graph(graph, "json")
        rebuilt = import_graph(text)
        assert rebuilt.to_jsonable() == graph.to_jsonable()
        assert export_graph(rebuilt, "json") == text

    def test_import_rejects_malformed(self):
        with pytest.raises(SchemaError):
            import_graph("{not json")
        with pytest.raises(SchemaError):
            import_graph('{"nodes": [{"key": "x", "sql": "SELECT * FROM t", '
                         '"log_indexes": [0]}], "edges": []}')

    def test_log_sequence_reconstruction(self):
        entries, _ = parse_log(";".join([Q1, Q2, Q1, Q3]))
        graph = mine(entries, FIG_LIBRARY, MiningConfig("adjacent"))
        seq = graph.log_sequence()
        k1, k2, k3 = (parse_query(q).canonical_key for q in (Q1, Q2, Q3))
        assert seq == [k1, k2, k1, k3]
