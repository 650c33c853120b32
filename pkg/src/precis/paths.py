"""XPath-like paths over query trees.

Syntax: steps joined by `/` (child) or `//` (descendant), each step a node
kind with optional `[attr="value"]` filters.  A leading step is matched as
a descendant of the query root, so both `where//expr` and
`project//projectclause` address clauses directly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .ast import VOCABULARY, Ast, AstNode
from .errors import ParseError, UnknownKindError

_STEP_RE = re.compile(r'([a-z]+)((?:\[[a-zA-Z_]+="[^"]*"\])*)')
_PRED_RE = re.compile(r'\[([a-zA-Z_]+)="([^"]*)"\]')


@dataclass(frozen=True)
class PathStep:
    axis: str  # "child" | "descendant"
    kind: str
    predicates: tuple[tuple[str, str], ...] = ()

    def accepts(self, node: AstNode) -> bool:
        if node.kind != self.kind:
            return False
        return all(node.attrs.get(k) == v for k, v in self.predicates)


@dataclass(frozen=True)
class NodePath:
    steps: tuple[PathStep, ...]
    text: str

    def __post_init__(self):
        if not self.steps:
            raise ParseError("path has no steps")
        for step in self.steps:
            if step.kind not in VOCABULARY:
                raise UnknownKindError(step.kind)


def parse_path(text: str) -> NodePath:
    stripped = text.strip()
    if not stripped:
        raise ParseError("empty path", 0)
    steps: list[PathStep] = []
    pos = 0
    axis = "descendant"  # leading step anchors as descendant of the root
    while pos < len(stripped):
        m = _STEP_RE.match(stripped, pos)
        if not m or m.start() != pos:
            raise ParseError(f"malformed path step in {text!r}", pos)
        kind, preds_text = m.group(1), m.group(2)
        predicates = tuple(_PRED_RE.findall(preds_text))
        steps.append(PathStep(axis, kind, predicates))
        pos = m.end()
        if pos == len(stripped):
            break
        if stripped.startswith("//", pos):
            axis, pos = "descendant", pos + 2
        elif stripped.startswith("/", pos):
            axis, pos = "child", pos + 1
        else:
            raise ParseError(f"expected '/' or '//' in path {text!r}", pos)
        if pos == len(stripped):
            raise ParseError(f"path {text!r} ends with a separator", pos)
    return NodePath(tuple(steps), stripped)


def eval_path(path: NodePath, ast: Ast) -> list[AstNode]:
    """All nodes matching the path, in document order.  Pure."""
    for step in path.steps:
        if step.kind not in VOCABULARY:
            raise UnknownKindError(step.kind)
    current: list[AstNode] = [ast.root]
    for step in path.steps:
        seen: set[int] = set()
        matched: list[AstNode] = []
        for node in current:
            candidates = _descendants(node) if step.axis == "descendant" else node.children
            for cand in candidates:
                if step.accepts(cand) and id(cand) not in seen:
                    seen.add(id(cand))
                    matched.append(cand)
        order = ast.order
        matched.sort(key=lambda n: order[id(n)])
        current = matched
        if not current:
            break
    return current


def _descendants(node: AstNode):
    for child in node.children:
        yield child
        yield from _descendants(child)
