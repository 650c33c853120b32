"""Interface assembly: panels, widget domains, query templates with named
slots, template instantiation, and coverage measurement.

A panel anchors one connected cluster of the transformation graph on its
earliest query; each mapped transformation group becomes one widget bound to
one slot of the panel template.  Instantiating every widget at its recorded
current value reproduces the panel's base query exactly.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation

from .ast import CLAUSE_RANK, SLOT_KIND, Ast, AstNode, serialize_node, shallow_equal
from .errors import InconsistentDomainError, PrecisError, SchemaError
from .generator import Mapping, TransformationGroup, site_kind
from .miner import TransformationGraph, connected_components
from .sqlparser import parse_query
from .ast import SourceQuery


class DomainValueError(PrecisError):
    """A slot value outside its widget's domain; carries the slot name."""

    def __init__(self, slot: str, message: str):
        super().__init__(f"slot {slot!r}: {message}")
        self.slot = slot


@dataclass(frozen=True)
class Widget:
    id: str
    kind: str
    slot: str
    domain: dict
    current: object
    caption: str
    site: str  # signature locating the slot in the panel's base tree


@dataclass
class Panel:
    id: int
    base_sql: str
    template: str
    widgets: list[Widget]
    base_ast: Ast = field(repr=False)
    template_tree: AstNode = field(repr=False)


@dataclass
class InterfaceSpec:
    panels: list[Panel]
    stats: dict

    def panel(self, panel_id: int) -> Panel:
        for panel in self.panels:
            if panel.id == panel_id:
                return panel
        raise KeyError(panel_id)

    def to_jsonable(self) -> dict:
        return {
            "panels": [
                {
                    "id": p.id,
                    "base_sql": p.base_sql,
                    "template": p.template,
                    "widgets": [
                        {
                            "id": w.id,
                            "kind": w.kind,
                            "slot": w.slot,
                            "domain": w.domain,
                            "current": w.current,
                            "caption": w.caption,
                            "site": w.site,
                        }
                        for w in p.widgets
                    ],
                }
                for p in self.panels
            ],
            "stats": self.stats,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_jsonable(), indent=2) + "\n"

    @classmethod
    def from_jsonable(cls, data: dict) -> "InterfaceSpec":
        if not isinstance(data, dict) or "panels" not in data:
            raise SchemaError("expected an object with 'panels'")
        panels = []
        for i, raw in enumerate(data["panels"]):
            loc = f"$.panels[{i}]"
            for name in ("id", "base_sql", "template", "widgets"):
                if name not in raw:
                    raise SchemaError(f"missing {name!r}", loc)
            base_ast = parse_query(raw["base_sql"])
            widgets = []
            for j, rw in enumerate(raw["widgets"]):
                wloc = f"{loc}.widgets[{j}]"
                for name in ("id", "kind", "slot", "domain", "current", "caption", "site"):
                    if name not in rw:
                        raise SchemaError(f"missing {name!r}", wloc)
                widgets.append(Widget(rw["id"], rw["kind"], rw["slot"], rw["domain"],
                                      rw["current"], rw["caption"], rw["site"]))
            plans = []
            for w in widgets:
                resolution = resolve_site(base_ast, w.site)
                if resolution is None:
                    raise SchemaError(f"site {w.site!r} does not resolve in base query",
                                      loc)
                parent, gap, nodes = resolution
                plans.append(_SlotPlan(w.slot, site_kind(w.site), parent, gap,
                                       frozenset(id(n) for n in nodes)))
            tree = build_template(base_ast.root, plans)
            if serialize_node(tree) != raw["template"]:
                raise SchemaError("template does not match its widgets", loc)
            panels.append(Panel(raw["id"], raw["base_sql"], raw["template"],
                                widgets, base_ast, tree))
        return cls(panels, data.get("stats", {}))

    @classmethod
    def from_json(cls, text: str) -> "InterfaceSpec":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"not valid JSON: {exc}") from exc
        return cls.from_jsonable(data)


# ---------------------------------------------------------------------------
# Site resolution and template construction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _SlotPlan:
    name: str
    site_kind: str
    parent: AstNode
    gap: int
    replaced_ids: frozenset[int]


_STEP_RE = re.compile(r"^([a-z]+)((?:\[[^\]]*\])*)#(\d+)$")


def _attr_suffix(node: AstNode) -> str:
    return "".join(f"[{k}={v}]" for k, v in sorted(node.attrs.items()))


def resolve_site(ast: Ast, signature: str) -> tuple[AstNode, int, list[AstNode]] | None:
    """Locate a change site inside a concrete tree.

    Returns (parent, gap, nodes-at-site); nodes may be empty when the site's
    subtree is absent (a toggle that is off in this query).  None when the
    signature's ancestor path does not exist here.
    """
    *steps, tail = signature.split("/")
    if not steps or steps[0] != "query":
        return None
    node = ast.root
    for step in steps[1:]:
        m = _STEP_RE.match(step)
        if not m:
            return None
        kind, attrs, ordinal = m.group(1), m.group(2), int(m.group(3))
        same_kind = [c for c in node.children if c.kind == kind]
        if ordinal >= len(same_kind):
            return None
        candidate = same_kind[ordinal]
        if _attr_suffix(candidate) != attrs:
            return None
        node = candidate
    m = re.match(r"^([a-z]+)@(\d+)$", tail)
    if not m:
        return None
    kind, gap = m.group(1), int(m.group(2))
    if node.kind == "query":
        if CLAUSE_RANK.get(kind) != gap:
            return None
        return node, gap, [c for c in node.children if c.kind == kind]
    # Non-root parent: find the run of site-kind children whose position
    # (children before the run) matches the gap.
    runs: list[tuple[int, list[AstNode]]] = []
    i = 0
    while i < len(node.children):
        if node.children[i].kind == kind:
            j = i
            while j < len(node.children) and node.children[j].kind == kind:
                j += 1
            runs.append((i, list(node.children[i:j])))
            i = j
        else:
            i += 1
    for start, nodes in runs:
        if start == gap:
            return node, gap, nodes
    if gap <= len(node.children):
        return node, gap, []  # absent subtree: a legal insertion point
    return None


def build_template(root: AstNode, plans: list[_SlotPlan]) -> AstNode:
    """Clone the tree with each plan's site replaced by a slot marker node."""
    by_parent: dict[int, list[_SlotPlan]] = {}
    for plan in plans:
        by_parent.setdefault(id(plan.parent), []).append(plan)

    def slot_node(plan: _SlotPlan) -> AstNode:
        return AstNode(SLOT_KIND, attrs={"site": plan.site_kind}, value=plan.name)

    def clause_rank(node: AstNode) -> int:
        kind = node.attrs["site"] if node.kind == SLOT_KIND else node.kind
        return CLAUSE_RANK.get(kind, len(CLAUSE_RANK))

    def rebuild(node: AstNode) -> AstNode:
        local = by_parent.get(id(node), [])
        replaced = {nid for p in local for nid in p.replaced_ids}
        if not local:
            children = tuple(rebuild(c) for c in node.children)
        elif node.kind == "query":
            kept = [rebuild(c) for c in node.children if id(c) not in replaced]
            markers = [slot_node(p) for p in local]
            children = tuple(sorted(kept + markers, key=clause_rank))
        else:
            out: list[AstNode] = []
            emitted: set[str] = set()
            insertions = {p.gap: p for p in local if not p.replaced_ids}
            owners = {nid: p for p in local for nid in p.replaced_ids}
            real_count = 0
            for child in node.children:
                plan = owners.get(id(child))
                if plan is not None:
                    if plan.name not in emitted:
                        out.append(slot_node(plan))
                        emitted.add(plan.name)
                    continue
                pending = insertions.get(real_count)
                if pending is not None and pending.name not in emitted:
                    out.append(slot_node(pending))
                    emitted.add(pending.name)
                out.append(rebuild(child))
                real_count += 1
            pending = insertions.get(real_count)
            if pending is not None and pending.name not in emitted:
                out.append(slot_node(pending))
            children = tuple(out)
        return AstNode(node.kind, attrs=dict(node.attrs), value=node.value,
                       children=children)

    return rebuild(root)


# ---------------------------------------------------------------------------
# Widget domains
# ---------------------------------------------------------------------------

def _display_value(kind: str, text: str | None) -> str:
    """Widget-facing form of a site value: string literals lose their quotes."""
    if text is None:
        return ""
    if kind == "strliteral" and len(text) >= 2 and text[0] == text[-1] == "'":
        return text[1:-1]
    return text


def _fragment(kind: str, value: str) -> str:
    """SQL fragment for a widget-facing value."""
    if kind == "strliteral" and value != "":
        return f"'{value}'"
    return value


def _numeric_domain(values: list[str]) -> dict:
    decimals = []
    for text in values:
        try:
            decimals.append(Decimal(text))
        except InvalidOperation:
            raise InconsistentDomainError(
                f"observed value {text!r} is not a number") from None
    decimals = sorted(set(decimals))
    low, high = decimals[0], decimals[-1]
    step = _grid_step(decimals)
    return {
        "type": "range",
        "min": format(low.normalize(), "f"),
        "max": format(high.normalize(), "f"),
        "step": format(step.normalize(), "f"),
    }


def _grid_step(decimals: list[Decimal]) -> Decimal:
    """Largest step whose grid from min hits every observed value: the gcd of
    the offsets; falls back to (max-min)/100 when degenerate."""
    low, high = decimals[0], decimals[-1]
    if low == high:
        return Decimal(1)
    scale = max(-d.as_tuple().exponent for d in decimals)
    factor = Decimal(10) ** scale
    import math
    ints = [int((d - low) * factor) for d in decimals]
    g = 0
    for value in ints:
        g = math.gcd(g, value)
    if g <= 0:
        return (high - low) / 100
    return Decimal(g) / factor


def _widget_domain(kind_id: str, group: TransformationGroup,
                   skind: str) -> tuple[dict, bool]:
    """Domain payload plus whether the slot may be empty."""
    raw_values = group.observed_values()
    display = sorted({"" if v == "" else _display_value(skind, v) for v in raw_values})
    allows_empty = "" in raw_values
    if kind_id == "dropdown" or kind_id == "button":
        return {"type": "options", "options": display}, allows_empty
    if kind_id == "listbox":
        options = sorted({v for v in raw_values if v != ""})
        return {"type": "options_set", "options": options}, True
    if kind_id == "slider":
        numbers = [v for v in raw_values if v != ""]
        return _numeric_domain(numbers), False
    if kind_id == "checkbox":
        on = next(v for v in raw_values if v != "")
        return {"type": "toggle", "on": on}, True
    if kind_id == "textbox":
        return {"type": "text", "literal": skind, "samples": display}, allows_empty
    raise ValueError(f"unknown widget kind {kind_id!r}")


# ---------------------------------------------------------------------------
# Slot naming and captions
# ---------------------------------------------------------------------------

def _sanitize(text: str) -> str:
    cleaned = re.sub(r"[^a-z0-9]+", "_", text.lower()).strip("_")
    return cleaned[:30].strip("_") or "slot"


def _slot_basename(parent: AstNode, skind: str, domain: dict) -> str:
    if domain["type"] == "toggle":
        return _sanitize(domain["on"])
    if skind == "tablename":
        return "table"
    if skind == "projectclause":
        return "columns"
    if parent.kind == "expr":
        for sibling in parent.children:
            if sibling.kind == "columnref":
                return _sanitize(sibling.value or "")
            if sibling.kind == "funccall":
                inner = ""
                for arg in sibling.walk():
                    if arg.kind == "columnref":
                        inner = arg.value or ""
                        break
                return _sanitize(f"{sibling.attrs.get('name', '')}_{inner}")
    return _sanitize(skind)


def _caption(parent: AstNode, nodes: list[AstNode], skind: str, domain: dict) -> str:
    if domain["type"] == "toggle":
        return domain["on"]
    if skind == "projectclause":
        return "columns"
    if skind == "tablename":
        return "table"
    if parent.kind == "expr" and len(nodes) == 1:
        parent_text = serialize_node(parent)
        return parent_text.replace(serialize_node(nodes[0]), "?", 1)
    return skind


# ---------------------------------------------------------------------------
# populate_widgets
# ---------------------------------------------------------------------------

def populate_widgets(mapping: Mapping, graph: TransformationGraph) -> InterfaceSpec:
    """One panel per connected component, anchored on its earliest logged
    query; one widget per mapped group with edges in the component whose site
    resolves in the anchor query."""
    components = connected_components(graph)
    panels: list[Panel] = []
    for panel_id, component in enumerate(components):
        base = graph.nodes[component[0]]
        comp_set = set(component)
        ordered = sorted(mapping.assignments, key=lambda a: (a[0].signatures, a[0].label))
        plans: list[_SlotPlan] = []
        widgets: list[Widget] = []
        used_slots: set[str] = set()
        claimed_sites: set[str] = set()
        for group, widget_kind in ordered:
            if len(group.signatures) != 1:
                continue  # multi-site groups are not representable as one slot
            signature = group.signatures[0]
            if signature in claimed_sites:
                continue
            if not any(e.src in comp_set for e in group.edges):
                continue
            resolution = resolve_site(base.ast, signature)
            if resolution is None:
                continue
            parent, gap, nodes = resolution
            skind = site_kind(signature)
            domain, _ = _widget_domain(widget_kind.id, group, skind)
            name = _slot_basename(parent, skind, domain)
            slot = name
            suffix = 2
            while slot in used_slots:
                slot = f"{name}_{suffix}"
                suffix += 1
            used_slots.add(slot)
            claimed_sites.add(signature)
            current = _current_value(widget_kind.id, skind, nodes)
            caption = _caption(parent, nodes, skind, domain)
            widgets.append(Widget(f"w{panel_id}_{len(widgets)}", widget_kind.id,
                                  slot, domain, current, caption, signature))
            plans.append(_SlotPlan(slot, skind, parent, gap,
                                   frozenset(id(n) for n in nodes)))
        tree = build_template(base.ast.root, plans)
        panels.append(Panel(panel_id, base.sql, serialize_node(tree),
                            widgets, base.ast, tree))

    spec = InterfaceSpec(panels, {})
    log = [(SourceQuery(graph.nodes[key].sql, i), graph.nodes[key].ast)
           for i, key in enumerate(graph.log_sequence())]
    result = coverage(spec, log)
    spec.stats = {
        "coverage": {
            "covered": result.covered,
            "total": result.total,
            "covered_raw": result.covered_raw,
            "total_raw": result.total_raw,
        },
        "C_e": mapping.c_e,
        "C_c": mapping.c_c,
        "S_max": mapping.cost.s_max,
    }
    return spec


def _current_value(kind_id: str, skind: str, nodes: list[AstNode]) -> object:
    texts = [serialize_node(n) for n in nodes]
    if kind_id == "checkbox":
        return bool(nodes)
    if kind_id == "listbox":
        return texts
    if not texts:
        return ""
    return _display_value(skind, texts[0])


# ---------------------------------------------------------------------------
# Instantiation
# ---------------------------------------------------------------------------

def slot_fragment(widget: Widget, value: object, permissive: bool = False) -> str:
    """Validate a slot value against the widget's domain and return the SQL
    fragment it contributes."""
    skind = site_kind(widget.site)
    domain = widget.domain
    dtype = domain["type"]
    if dtype == "options":
        if not isinstance(value, str) or value not in domain["options"]:
            raise DomainValueError(widget.slot, f"value {value!r} not in options")
        return _fragment(skind, value)
    if dtype == "options_set":
        if not isinstance(value, (list, tuple)) or not value:
            raise DomainValueError(widget.slot, "expected a non-empty list of options")
        for item in value:
            if item not in domain["options"]:
                raise DomainValueError(widget.slot, f"value {item!r} not in options")
        return ", ".join(value)
    if dtype == "toggle":
        if not isinstance(value, bool):
            raise DomainValueError(widget.slot, "expected true or false")
        return domain["on"] if value else ""
    if dtype == "range":
        try:
            number = Decimal(str(value))
        except InvalidOperation:
            raise DomainValueError(widget.slot, f"value {value!r} is not a number") from None
        low, high, step = (Decimal(domain[k]) for k in ("min", "max", "step"))
        if not (low <= number <= high):
            raise DomainValueError(widget.slot, f"{number} outside [{low}, {high}]")
        if step > 0 and (number - low) % step != 0:
            raise DomainValueError(widget.slot, f"{number} is off the {step} grid")
        return str(value)
    if dtype == "text":
        text = str(value)
        if not permissive:
            if domain["literal"] == "numliteral":
                try:
                    Decimal(text)
                except InvalidOperation:
                    raise DomainValueError(widget.slot,
                                           f"value {text!r} is not a number") from None
            elif domain["literal"] == "strliteral" and "'" in text:
                raise DomainValueError(widget.slot, "embedded quotes are not allowed")
        return _fragment(skind, text)
    raise DomainValueError(widget.slot, f"unknown domain type {dtype!r}")


def instantiate(panel: Panel, slot_values: dict[str, object] | None = None,
                permissive: bool = False) -> str:
    """Substitute slot values (defaulting to each widget's current value)
    into the panel template and return whitespace-normalized SQL."""
    values = dict(slot_values or {})
    known = {w.slot for w in panel.widgets}
    for slot in values:
        if slot not in known:
            raise DomainValueError(slot, "unknown slot")
    text = panel.template
    for widget in panel.widgets:
        value = values.get(widget.slot, widget.current)
        fragment = slot_fragment(widget, value, permissive)
        text = text.replace("{{" + widget.slot + "}}", fragment)
    return re.sub(r"\s+", " ", text).strip()


# ---------------------------------------------------------------------------
# Coverage
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoverageResult:
    covered: int
    total: int
    covered_raw: int
    total_raw: int


def coverage(spec: InterfaceSpec, log: list[tuple[SourceQuery, Ast]]) -> CoverageResult:
    """A query is covered when some panel template, every slot filled from
    its widget's domain, reproduces the query's canonical key."""
    distinct: dict[str, Ast] = {}
    counts: dict[str, int] = {}
    for _, ast in log:
        distinct.setdefault(ast.canonical_key, ast)
        counts[ast.canonical_key] = counts.get(ast.canonical_key, 0) + 1
    covered_keys = {key for key, ast in distinct.items()
                    if any(_panel_covers(panel, ast) for panel in spec.panels)}
    covered_raw = sum(counts[k] for k in covered_keys)
    return CoverageResult(len(covered_keys), len(distinct),
                          covered_raw, sum(counts.values()))


def _panel_covers(panel: Panel, ast: Ast) -> bool:
    widgets = {w.slot: w for w in panel.widgets}
    return _unify(panel.template_tree, ast.root, widgets)


def _unify(template: AstNode, query: AstNode, widgets: dict[str, Widget]) -> bool:
    if template.kind == SLOT_KIND:
        return _slot_accepts(widgets[template.value or ""], [query])
    if not shallow_equal(template, query):
        return False
    return _align(list(template.children), list(query.children), 0, 0, widgets)


def _align(tkids: list[AstNode], qkids: list[AstNode], ti: int, qi: int,
           widgets: dict[str, Widget]) -> bool:
    if ti == len(tkids):
        return qi == len(qkids)
    head = tkids[ti]
    if head.kind != SLOT_KIND:
        if qi >= len(qkids) or not _unify(head, qkids[qi], widgets):
            return False
        return _align(tkids, qkids, ti + 1, qi + 1, widgets)
    skind = head.attrs["site"]
    widget = widgets[head.value or ""]
    limit = qi
    while limit < len(qkids) and qkids[limit].kind == skind:
        limit += 1
    # Try consuming runs from longest to shortest so set slots take whole runs.
    for end in range(limit, qi - 1, -1):
        if _slot_accepts(widget, qkids[qi:end]) and \
                _align(tkids, qkids, ti + 1, end, widgets):
            return True
    return False


def _slot_accepts(widget: Widget, nodes: list[AstNode]) -> bool:
    skind = site_kind(widget.site)
    domain = widget.domain
    dtype = domain["type"]
    texts = [serialize_node(n) for n in nodes]
    if dtype == "options":
        if len(nodes) > 1:
            return False
        value = _display_value(skind, texts[0]) if texts else ""
        return value in domain["options"]
    if dtype == "options_set":
        return bool(nodes) and all(t in domain["options"] for t in texts)
    if dtype == "toggle":
        return not nodes or (len(nodes) == 1 and texts[0] == domain["on"])
    if dtype == "range":
        if len(nodes) != 1 or nodes[0].kind != "numliteral":
            return False
        number = Decimal(nodes[0].value or "0")
        low, high, step = (Decimal(domain[k]) for k in ("min", "max", "step"))
        return low <= number <= high and (step <= 0 or (number - low) % step == 0)
    if dtype == "text":
        return len(nodes) == 1 and nodes[0].kind == domain["literal"]
    return False
