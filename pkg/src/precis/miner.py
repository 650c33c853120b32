"""Evaluate a statement library over query pairs and assemble the
transformation graph: one node per distinct query, one typed directed edge
per statement match.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .ast import Ast, SourceQuery, serialize
from .errors import SchemaError
from .pilang import MatchResult, MatchSite, StatementLibrary, evaluate
from .sqlparser import parse_query

# All-pairs mining is quadratic; beyond this many distinct queries the
# automatic pairing falls back to adjacent pairs.
AUTO_ALL_PAIRS_LIMIT = 500


@dataclass(frozen=True)
class MiningConfig:
    pairing: str = "auto"  # "adjacent" | "all" | "window" | "auto"
    window: int = 1
    directions: str = "both"

    def __post_init__(self):
        if self.pairing not in ("adjacent", "all", "window", "auto"):
            raise ValueError(f"unknown pairing {self.pairing!r}")
        if self.pairing == "window" and self.window < 1:
            raise ValueError("window size must be >= 1")
        if self.directions != "both":
            raise ValueError("only directions='both' is supported")


@dataclass
class GraphNode:
    key: str
    sql: str
    ast: Ast
    log_indexes: list[int] = field(default_factory=list)

    @property
    def multiplicity(self) -> int:
        return len(self.log_indexes)


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    label: str
    sites: tuple[MatchSite, ...]
    match: MatchResult | None = None

    @property
    def signatures(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(site.signature for site in self.sites))

    def identity(self) -> tuple:
        return (self.src, self.dst, self.label, self.signatures)


@dataclass
class TransformationGraph:
    nodes: dict[str, GraphNode]
    edges: list[Edge]

    def node_order(self) -> list[str]:
        return sorted(self.nodes, key=lambda k: min(self.nodes[k].log_indexes))

    def log_sequence(self) -> list[str]:
        """Node key at each log position, rebuilding the original order."""
        seq: dict[int, str] = {}
        for node in self.nodes.values():
            for idx in node.log_indexes:
                seq[idx] = node.key
        return [seq[i] for i in sorted(seq)]

    def to_jsonable(self) -> dict:
        order = {key: i for i, key in enumerate(self.node_order())}
        nodes = [
            {
                "key": node.key,
                "sql": node.sql,
                "multiplicity": node.multiplicity,
                "log_indexes": sorted(node.log_indexes),
            }
            for node in sorted(self.nodes.values(), key=lambda n: order[n.key])
        ]
        edges = [
            {
                "src": e.src,
                "dst": e.dst,
                "label": e.label,
                "sites": [
                    {"signature": s.signature, "old": s.old_text, "new": s.new_text}
                    for s in e.sites
                ],
            }
            for e in sorted(self.edges,
                            key=lambda e: (order[e.src], order[e.dst], e.label, e.signatures))
        ]
        return {"nodes": nodes, "edges": edges}


def mine(log: list[tuple[SourceQuery, Ast]], library: StatementLibrary,
         config: MiningConfig = MiningConfig()) -> TransformationGraph:
    """Build the transformation graph for a parsed log.

    Pure in its inputs: repeated calls produce identical graphs.
    """
    if not log:
        raise ValueError("log is empty")
    nodes: dict[str, GraphNode] = {}
    for source, ast in log:
        node = nodes.get(ast.canonical_key)
        if node is None:
            node = GraphNode(ast.canonical_key, serialize(ast), ast)
            nodes[ast.canonical_key] = node
        node.log_indexes.append(source.log_index)

    sequence = [ast.canonical_key for _, ast in
                sorted(log, key=lambda entry: entry[0].log_index)]
    pairs = _select_pairs(sequence, list(nodes), config)

    order = {key: min(nodes[key].log_indexes) for key in nodes}
    edges: list[Edge] = []
    seen: set[tuple] = set()
    for a_key, b_key in sorted(pairs, key=lambda p: (order[p[0]], order[p[1]])):
        for stmt in library:
            result = evaluate(stmt, nodes[a_key].ast, nodes[b_key].ast)
            if result is None:
                continue
            edge = Edge(a_key, b_key, stmt.label, result.sites, result)
            if edge.identity() not in seen:
                seen.add(edge.identity())
                edges.append(edge)
    return TransformationGraph(nodes, edges)


def _select_pairs(sequence: list[str], keys: list[str],
                  config: MiningConfig) -> set[tuple[str, str]]:
    pairing = config.pairing
    if pairing == "auto":
        pairing = "all" if len(keys) <= AUTO_ALL_PAIRS_LIMIT else "adjacent"
    pairs: set[tuple[str, str]] = set()
    if pairing == "all":
        for a in keys:
            for b in keys:
                if a != b:
                    pairs.add((a, b))
        return pairs
    window = 1 if pairing == "adjacent" else config.window
    for i in range(len(sequence)):
        for j in range(i + 1, min(i + window + 1, len(sequence))):
            a, b = sequence[i], sequence[j]
            if a != b:
                pairs.add((a, b))
                pairs.add((b, a))
    return pairs


# ---------------------------------------------------------------------------
# Export / import
# ---------------------------------------------------------------------------

_CLAUSE_COLORS = {"project": "blue", "where": "red", "having": "red"}


def edge_color(edge: Edge) -> str:
    """Color by the top-level clause of the first site signature."""
    if not edge.sites:
        return "gray"
    signature = edge.sites[0].signature
    steps = signature.split("/")
    clause = steps[1] if len(steps) > 1 else steps[0]
    clause_kind = clause.split("[")[0].split("#")[0].split("@")[0]
    return _CLAUSE_COLORS.get(clause_kind, "gray")


def export_graph(graph: TransformationGraph, format: str = "json") -> str:
    if format == "json":
        return json.dumps(graph.to_jsonable(), indent=2) + "\n"
    if format == "dot":
        return _export_dot(graph)
    raise ValueError(f"unknown export format {format!r}")


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def _export_dot(graph: TransformationGraph) -> str:
    order = graph.node_order()
    ids = {key: f"n{i}" for i, key in enumerate(order)}
    lines = ["digraph transformations {", "  rankdir=LR;"]
    for key in order:
        label = _dot_escape(graph.nodes[key].sql)
        lines.append(f'  {ids[key]} [shape=box, label="{label}"];')
    for edge in sorted(graph.edges,
                       key=lambda e: (order.index(e.src), order.index(e.dst), e.label)):
        color = edge_color(edge)
        lines.append(
            f'  {ids[edge.src]} -> {ids[edge.dst]} '
            f'[label="{_dot_escape(edge.label)}", color={color}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def import_graph(text: str) -> TransformationGraph:
    """Rebuild a graph from its JSON export; inverse of export_graph."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from exc
    if not isinstance(data, dict) or "nodes" not in data or "edges" not in data:
        raise SchemaError("expected an object with 'nodes' and 'edges'")
    nodes: dict[str, GraphNode] = {}
    for i, raw in enumerate(data["nodes"]):
        loc = f"$.nodes[{i}]"
        for fieldname in ("key", "sql", "log_indexes"):
            if fieldname not in raw:
                raise SchemaError(f"missing {fieldname!r}", loc)
        ast = parse_query(raw["sql"])
        if ast.canonical_key != raw["key"]:
            raise SchemaError("sql does not reproduce the stored key", loc)
        if raw["key"] in nodes:
            raise SchemaError("duplicate node key", loc)
        nodes[raw["key"]] = GraphNode(raw["key"], raw["sql"], ast,
                                      list(raw["log_indexes"]))
    edges: list[Edge] = []
    for i, raw in enumerate(data["edges"]):
        loc = f"$.edges[{i}]"
        for fieldname in ("src", "dst", "label", "sites"):
            if fieldname not in raw:
                raise SchemaError(f"missing {fieldname!r}", loc)
        if raw["src"] not in nodes or raw["dst"] not in nodes:
            raise SchemaError("edge endpoint is not a node", loc)
        sites = tuple(
            MatchSite(var="", signature=s["signature"],
                      old_text=s["old"], new_text=s["new"])
            for s in raw["sites"]
        )
        edges.append(Edge(raw["src"], raw["dst"], raw["label"], sites, None))
    return TransformationGraph(nodes, edges)


def connected_components(graph: TransformationGraph) -> list[list[str]]:
    """Undirected components, each sorted and listed by earliest log index."""
    parent = {key: key for key in graph.nodes}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for edge in graph.edges:
        ra, rb = find(edge.src), find(edge.dst)
        if ra != rb:
            parent[ra] = rb
    groups: dict[str, list[str]] = {}
    for key in graph.nodes:
        groups.setdefault(find(key), []).append(key)

    def first_index(keys: list[str]) -> int:
        return min(min(graph.nodes[k].log_indexes) for k in keys)

    components = [sorted(keys, key=lambda k: min(graph.nodes[k].log_indexes))
                  for keys in groups.values()]
    components.sort(key=first_index)
    return components
