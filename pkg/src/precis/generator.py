"""Component mapping: group transformation edges by change site, then
greedily assign widget kinds under a complexity budget so that the average
interaction cost between logged queries is minimized.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .miner import Edge, TransformationGraph
from .widgets import (
    ANY,
    COLUMNS,
    LITERAL,
    TOGGLE,
    VALUE_NUMBER,
    VALUE_STRING,
    CostModel,
    InteractionLibrary,
    WidgetKind,
)


def site_kind(signature: str) -> str:
    """Node kind of the changed subtree, from the signature's last step."""
    tail = signature.rsplit("/", 1)[-1]
    return tail.split("@")[0].split("[")[0]


@dataclass(frozen=True)
class TransformationGroup:
    """All edges sharing one statement label and one change-site shape; the
    unit that gets one widget."""

    label: str
    signatures: tuple[str, ...]
    edges: tuple[Edge, ...]

    @property
    def key(self) -> tuple[str, tuple[str, ...]]:
        return (self.label, self.signatures)

    @property
    def observed_old(self) -> list[str | None]:
        return [s.old_text for e in self.edges for s in e.sites]

    @property
    def observed_new(self) -> list[str | None]:
        return [s.new_text for e in self.edges for s in e.sites]

    def observed_values(self) -> list[str]:
        """Distinct non-absent site values, sorted; '' stands for an absent side."""
        values = set()
        for text in self.observed_old + self.observed_new:
            values.add("" if text is None else text)
        return sorted(values)

    def features(self) -> frozenset[str]:
        feats = {ANY}
        if len(self.signatures) == 1:
            kind = site_kind(self.signatures[0])
            single = all(len(e.sites) == 1 for e in self.edges)
            sides = [(s.old_text, s.new_text) for e in self.edges for s in e.sites]
            both_present = all(o is not None and n is not None for o, n in sides)
            if kind == "projectclause":
                feats.add(COLUMNS)
            elif single and both_present:
                if kind == "numliteral":
                    feats.update((VALUE_NUMBER, LITERAL))
                elif kind == "strliteral":
                    feats.update((VALUE_STRING, LITERAL))
                elif kind in ("tablename", "columnref", "alias"):
                    feats.add(VALUE_STRING)
            elif single:
                variants = {t for o, n in sides for t in (o, n) if t is not None}
                if len(variants) == 1:
                    feats.add(TOGGLE)
        return frozenset(feats)


def group_transformations(graph: TransformationGraph) -> list[TransformationGroup]:
    """Partition the graph's edges into one group per (label, site shape)."""
    buckets: dict[tuple[str, tuple[str, ...]], list[Edge]] = {}
    for edge in graph.edges:
        buckets.setdefault((edge.label, edge.signatures), []).append(edge)
    order = {key: i for i, key in enumerate(graph.node_order())}
    groups = []
    for (label, signatures), edges in buckets.items():
        edges.sort(key=lambda e: (order[e.src], order[e.dst]))
        groups.append(TransformationGroup(label, signatures, tuple(edges)))
    groups.sort(key=lambda g: g.key)
    return groups


def compatible_widgets(group: TransformationGroup,
                       library: InteractionLibrary) -> list[WidgetKind]:
    feats = group.features()
    return [w for w in library if w.compatible & feats]


def effective_complexity(widget: WidgetKind, group: TransformationGroup) -> float:
    """Buttons pay their complexity once per option they must offer."""
    if widget.id == "button":
        return widget.c_c * max(len(group.observed_values()), 1)
    return widget.c_c


@dataclass(frozen=True)
class Mapping:
    """The solved assignment of groups to widget kinds, with its costs."""

    assignments: tuple[tuple[TransformationGroup, WidgetKind], ...]
    c_e: float
    c_c: float
    cost: CostModel
    penalty: float


def pair_universe(graph: TransformationGraph, cost: CostModel) -> list[tuple[str, str]]:
    """The query pairs the objective averages over.

    adjacent: consecutive log entries with distinct queries, one entry per
    occurrence; all: every ordered pair of distinct graph nodes.
    """
    if cost.pair_universe == "all":
        order = graph.node_order()
        return [(a, b) for a in order for b in order if a != b]
    sequence = graph.log_sequence()
    return [(a, b) for a, b in zip(sequence, sequence[1:]) if a != b]


def _shortest_costs(graph: TransformationGraph,
                    assignments, sources: set[str]) -> dict[str, dict[str, float]]:
    adjacency: dict[str, list[tuple[str, float]]] = {k: [] for k in graph.nodes}
    for group, widget in assignments:
        for edge in group.edges:
            adjacency[edge.src].append((edge.dst, widget.c_e))
    out: dict[str, dict[str, float]] = {}
    for start in sources:
        dist = {start: 0.0}
        heap = [(0.0, start)]
        while heap:
            d, node = heapq.heappop(heap)
            if d > dist.get(node, float("inf")):
                continue
            for nxt, w in adjacency[node]:
                nd = d + w
                if nd < dist.get(nxt, float("inf")):
                    dist[nxt] = nd
                    heapq.heappush(heap, (nd, nxt))
        out[start] = dist
    return out


def compute_Ce(graph: TransformationGraph, mapping: Mapping,
               cost: CostModel | None = None) -> float:
    """Average cheapest-path cost between the pair universe's query pairs,
    using only edges whose group is mapped; unreachable pairs pay the penalty."""
    cost = cost or mapping.cost
    pairs = pair_universe(graph, cost)
    if not pairs:
        return 0.0
    penalty = mapping.penalty
    sources = {a for a, _ in pairs}
    dists = _shortest_costs(graph, mapping.assignments, sources)
    total = 0.0
    for a, b in pairs:
        total += dists[a].get(b, penalty)
    return total / len(pairs)


def greedy_optimize(graph: TransformationGraph,
                    groups: list[TransformationGroup],
                    library: InteractionLibrary,
                    cost: CostModel) -> Mapping:
    """Greedy solver: at each step take the feasible (group, widget)
    assignment that lowers the objective most, retire the group, and repeat
    until no feasible candidate improves the objective or the budget is
    exhausted.  Ties break on smaller complexity, then group key, then
    widget id, so results are reproducible.
    """
    penalty = cost.resolve_penalty(len(graph.nodes), library)
    candidates = [(g, w) for g in groups for w in compatible_widgets(g, library)]
    assignments: list[tuple[TransformationGroup, WidgetKind]] = []
    taken: set[tuple] = set()
    total_cc = 0.0

    def objective(current) -> float:
        probe = Mapping(tuple(current), 0.0, 0.0, cost, penalty)
        return compute_Ce(graph, probe, cost)

    current_ce = objective(assignments)
    while True:
        best = None
        for group, widget in candidates:
            if group.key in taken:
                continue
            extra = effective_complexity(widget, group)
            if total_cc + extra > cost.s_max:
                continue
            ce = objective(assignments + [(group, widget)])
            rank = (ce, extra, group.key, widget.id)
            if ce < current_ce - 1e-12 and (best is None or rank < best[0]):
                best = (rank, group, widget, extra, ce)
        if best is None:
            break
        _, group, widget, extra, ce = best
        assignments.append((group, widget))
        taken.add(group.key)
        total_cc += extra
        current_ce = ce
    return Mapping(tuple(assignments), current_ce, total_cc, cost, penalty)
