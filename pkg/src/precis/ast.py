"""Ordered labeled trees for the SQL subset.

Node kinds come from a fixed, closed vocabulary so that tree paths written
against one query apply to any other.  Trees are immutable after
construction and safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from functools import cached_property
from types import MappingProxyType
from typing import Iterator, Mapping

VOCABULARY = frozenset({
    "query", "project", "projectclause", "star",
    "from", "tableclause", "tablename",
    "where", "having",
    "groupby", "groupitem", "orderby", "orderitem",
    "limitclause", "topclause",
    "expr", "funccall", "columnref",
    "strliteral", "numliteral", "alias",
})

# Kinds that carry a `value` payload (literal or identifier lexeme).
VALUE_KINDS = frozenset({"strliteral", "numliteral", "tablename", "columnref", "alias"})

EXPR_OPS = frozenset({"=", "<>", "<", "<=", ">", ">=", "AND", "OR", "NOT", "BETWEEN"})

# Fixed order of clause children under a `query` node.  The rank doubles as
# the canonical gap index for change sites directly under the root, which
# keeps site identity stable across queries with different clause sets.
CLAUSE_RANK = {
    "project": 0, "from": 1, "where": 2, "groupby": 3,
    "having": 4, "orderby": 5, "limitclause": 6, "topclause": 7,
}

# Internal kind used for template holes; never produced by the parser.
SLOT_KIND = "slot"


def canonical_number(lexeme: str) -> str:
    """Decimal-canonical form of a number lexeme: 4983.00 -> 4983, 0.50 -> 0.5."""
    try:
        return format(Decimal(lexeme).normalize(), "f")
    except InvalidOperation:
        raise ValueError(f"not a decimal number: {lexeme!r}") from None


@dataclass(frozen=True, eq=False)
class AstNode:
    """One tree node: kind, structural attrs, optional value, ordered children.

    Identity (eq/hash) is object identity; structural equality goes through
    the canonical serialization.
    """

    kind: str
    attrs: Mapping[str, str] = field(default_factory=dict)
    value: str | None = None
    children: tuple["AstNode", ...] = ()
    span: tuple[int, int] | None = None

    def __post_init__(self):
        object.__setattr__(self, "attrs", MappingProxyType(dict(self.attrs)))
        object.__setattr__(self, "children", tuple(self.children))

    def attr(self, name: str) -> str | None:
        return self.attrs.get(name)

    def walk(self) -> Iterator["AstNode"]:
        """Preorder traversal of this subtree."""
        yield self
        for child in self.children:
            yield from child.walk()

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        bits = [self.kind]
        if self.attrs:
            bits.append("[" + ",".join(f"{k}={v}" for k, v in sorted(self.attrs.items())) + "]")
        if self.value is not None:
            bits.append(f":{self.value}")
        return f"<{''.join(bits)} n={len(self.children)}>"


@dataclass(frozen=True, eq=False)
class Ast:
    """A whole parsed query: root node plus its canonical dedup key."""

    root: AstNode
    canonical_key: str

    @classmethod
    def from_root(cls, root: AstNode) -> "Ast":
        return cls(root=root, canonical_key=serialize_node(root, canonical=True))

    @cached_property
    def parents(self) -> dict[int, AstNode | None]:
        """id(node) -> parent node (None for the root)."""
        out: dict[int, AstNode | None] = {id(self.root): None}
        for node in self.root.walk():
            for child in node.children:
                out[id(child)] = node
        return out

    @cached_property
    def order(self) -> dict[int, int]:
        """id(node) -> preorder index, defining document order."""
        return {id(n): i for i, n in enumerate(self.root.walk())}

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"<Ast {self.canonical_key!r}>"


@dataclass(frozen=True)
class SourceQuery:
    """One statement of a log: raw text and its position among parsed entries."""

    text: str
    log_index: int


def nodes_equal(a: AstNode, b: AstNode) -> bool:
    """Structural equality: kinds, attrs, values (decimal-normalized numbers),
    child order."""
    if not shallow_equal(a, b) or len(a.children) != len(b.children):
        return False
    return all(nodes_equal(x, y) for x, y in zip(a.children, b.children))


def shallow_equal(a: AstNode, b: AstNode) -> bool:
    """Structural equality of a single node ignoring children."""
    if a.kind != b.kind or dict(a.attrs) != dict(b.attrs):
        return False
    if a.kind == "numliteral":
        return canonical_number(a.value or "") == canonical_number(b.value or "")
    return a.value == b.value


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

# Precedence for deciding where parentheses are required on re-emission.
_PRECEDENCE = {"OR": 1, "AND": 2, "NOT": 3}


def serialize(ast: Ast, canonical: bool = False) -> str:
    return serialize_node(ast.root, canonical=canonical)


def serialize_node(node: AstNode, canonical: bool = False) -> str:
    """Deterministic single-space SQL rendering of a subtree.

    With canonical=True number literals are decimal-normalized; everything
    else is rendered identically, so the canonical form doubles as the
    structural identity key.
    """
    return _render(node, canonical)


def _render(node: AstNode, canon: bool) -> str:
    kind = node.kind
    if kind == "query":
        return _render_query(node, canon)
    if kind == "project":
        return ", ".join(_render(c, canon) for c in node.children)
    if kind == "projectclause":
        return _render_aliased(node, canon)
    if kind == "star":
        return "*"
    if kind == "from":
        return "FROM " + ", ".join(_render(c, canon) for c in node.children)
    if kind == "tableclause":
        return _render_aliased(node, canon)
    if kind == "tablename" or kind == "columnref":
        return node.value or ""
    if kind == "where":
        return "WHERE " + _render(node.children[0], canon)
    if kind == "having":
        return "HAVING " + _render(node.children[0], canon)
    if kind == "groupby":
        return "GROUP BY " + ", ".join(_render(c, canon) for c in node.children)
    if kind == "groupitem":
        return _render(node.children[0], canon)
    if kind == "orderby":
        return "ORDER BY " + ", ".join(_render(c, canon) for c in node.children)
    if kind == "orderitem":
        text = _render(node.children[0], canon)
        direction = node.attr("dir")
        return f"{text} {direction}" if direction else text
    if kind == "limitclause":
        return "LIMIT " + _render(node.children[0], canon)
    if kind == "topclause":
        return "TOP " + _render(node.children[0], canon)
    if kind == "expr":
        return _render_expr(node, canon)
    if kind == "funccall":
        args = ", ".join(_render(c, canon) for c in node.children)
        return f"{node.attr('name')}({args})"
    if kind == "strliteral":
        return f"'{node.value}'"
    if kind == "numliteral":
        return canonical_number(node.value or "") if canon else (node.value or "")
    if kind == "alias":
        return node.value or ""
    if kind == SLOT_KIND:
        return "{{" + (node.value or "") + "}}"
    raise ValueError(f"cannot serialize node kind {kind!r}")


def _render_aliased(node: AstNode, canon: bool) -> str:
    head = _render(node.children[0], canon)
    if len(node.children) > 1 and node.children[1].kind == "alias":
        alias = node.children[1]
        joiner = " AS " if alias.attr("as") else " "
        return head + joiner + (alias.value or "")
    return head


def _render_expr(node: AstNode, canon: bool) -> str:
    op = node.attr("op")
    if op == "NOT":
        text = "NOT " + _render_operand(node.children[0], node, canon)
    elif op == "BETWEEN":
        lhs, low, high = (_render(c, canon) for c in node.children)
        text = f"{lhs} BETWEEN {low} AND {high}"
    elif op in ("AND", "OR"):
        text = f" {op} ".join(_render_operand(c, node, canon) for c in node.children)
    else:
        left, right = (_render(c, canon) for c in node.children)
        text = f"{left} {op} {right}"
    if node.attr("paren"):
        return f"({text})"
    return text


def _render_operand(child: AstNode, parent: AstNode, canon: bool) -> str:
    text = _render(child, canon)
    if child.kind != "expr" or child.attr("paren"):
        return text
    child_prec = _PRECEDENCE.get(child.attr("op") or "", 4)
    parent_prec = _PRECEDENCE.get(parent.attr("op") or "", 4)
    if child_prec < parent_prec:
        return f"({text})"
    return text


def _render_query(node: AstNode, canon: bool) -> str:
    top_text = None
    select_text = "*"
    tail: list[str] = []
    for child in node.children:
        kind = child.kind
        site = child.attr("site") if kind == SLOT_KIND else None
        if kind == "topclause" or site == "topclause":
            top_text = _render(child, canon)
        elif kind == "project":
            select_text = _render(child, canon)
        else:
            tail.append(_render(child, canon))
    parts = ["SELECT"]
    if top_text is not None:
        parts.append(top_text)
    parts.append(select_text)
    parts.extend(tail)
    return " ".join(parts)
