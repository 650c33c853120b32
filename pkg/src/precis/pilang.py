"""Statement DSL describing admissible structural differences between two
query trees.

A statement has three clauses: FROM binds range variables to tree paths,
WHERE is a boolean predicate over the bound variables, MATCH names the
transformation.  Evaluating a statement over an ordered tree pair succeeds
only when the trees are identical outside the subtrees the paths match and
the predicate holds over the matched values.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping

from .ast import CLAUSE_RANK, Ast, AstNode, serialize_node, shallow_equal
from .errors import (
    DuplicateLabelError,
    ParseError,
    TypeMismatchError,
    UndeclaredVariableError,
)
from .paths import NodePath, eval_path, parse_path

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_RESERVED = {"and", "or", "not", "equal", "subset", "from", "where", "match", "as"}


# ---------------------------------------------------------------------------
# Statement model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PathBinding:
    path: NodePath
    var: str


@dataclass(frozen=True)
class SetTerm:
    """A range variable, optionally pinned to one side of the pair."""

    var: str
    version: str | None  # None | "old" | "new"


@dataclass(frozen=True)
class CardTerm:
    """|T|: number of matched sites of a set term."""

    inner: SetTerm


@dataclass(frozen=True)
class IntLiteral:
    value: int


@dataclass(frozen=True)
class PlusTerm:
    base: "IntTerm"
    addend: int


IntTerm = CardTerm | IntLiteral | PlusTerm
Term = SetTerm | CardTerm | IntLiteral | PlusTerm


@dataclass(frozen=True)
class Comparison:
    left: Term
    op: str  # equal | not_equal | subset | = | < | <= | > | >=
    right: Term


@dataclass(frozen=True)
class BoolOp:
    op: str  # AND | OR | NOT
    operands: tuple["PredicateExpr", ...]


PredicateExpr = Comparison | BoolOp


@dataclass(frozen=True)
class Statement:
    bindings: tuple[PathBinding, ...]
    predicate: PredicateExpr
    label: str


@dataclass(frozen=True)
class StatementLibrary:
    statements: tuple[Statement, ...]

    def __len__(self) -> int:
        return len(self.statements)

    def __iter__(self):
        return iter(self.statements)

    def get(self, label: str) -> Statement:
        for stmt in self.statements:
            if stmt.label == label:
                return stmt
        raise KeyError(label)


# ---------------------------------------------------------------------------
# Statement parsing
# ---------------------------------------------------------------------------

def parse_statement(text: str) -> Statement:
    """Parse one FROM/WHERE/MATCH statement."""
    scanner = _Scanner(text)
    scanner.expect_keyword("FROM")
    bindings: list[PathBinding] = []
    while True:
        path_text = scanner.read_path_token()
        path = parse_path(path_text)
        scanner.expect_keyword("AS")
        var = scanner.read_identifier("range variable")
        if var.lower() in _RESERVED:
            raise ParseError(f"variable name {var!r} is reserved", scanner.pos)
        if any(b.var == var for b in bindings):
            raise ParseError(f"variable {var!r} bound twice", scanner.pos)
        bindings.append(PathBinding(path, var))
        if not scanner.try_punct(","):
            break
    scanner.expect_keyword("WHERE")
    predicate_text, match_pos = scanner.read_until_keyword("MATCH")
    label = scanner.read_identifier("match label")
    scanner.expect_end()
    predicate = _parse_predicate(predicate_text, offset=match_pos)
    declared = {b.var for b in bindings}
    for used in _predicate_vars(predicate):
        if used not in declared:
            raise UndeclaredVariableError(used)
    return Statement(tuple(bindings), predicate, label)


_COMMENT_RE = re.compile(r"(^|\s)//.*$")


def parse_library(text: str) -> StatementLibrary:
    """Parse a `.pilang` file: statements separated by blank lines.

    `//` opens a comment at line start or after whitespace; the `//`
    descendant separator inside paths is never preceded by a space.
    """
    lines = []
    for line in text.splitlines():
        stripped = _COMMENT_RE.sub("", line).rstrip()
        lines.append(stripped)
    blocks: list[str] = []
    current: list[str] = []
    for line in lines:
        if line.strip():
            current.append(line)
        elif current:
            blocks.append("\n".join(current))
            current = []
    if current:
        blocks.append("\n".join(current))
    statements: list[Statement] = []
    labels: set[str] = set()
    for index, block in enumerate(blocks):
        try:
            stmt = parse_statement(block)
        except ParseError as exc:
            raise ParseError(f"statement {index}: {exc}", exc.position) from exc
        if stmt.label in labels:
            raise DuplicateLabelError(stmt.label)
        labels.add(stmt.label)
        statements.append(stmt)
    return StatementLibrary(tuple(statements))


class _Scanner:
    """Clause-aware scanner: paths are read as raw tokens, keywords are
    case-insensitive standalone words."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def _skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def expect_keyword(self, word: str):
        self._skip_ws()
        m = _IDENT_RE.match(self.text, self.pos)
        if not m or m.group(0).upper() != word:
            raise ParseError(f"expected {word}", self.pos)
        self.pos = m.end()

    def read_identifier(self, what: str) -> str:
        self._skip_ws()
        m = _IDENT_RE.match(self.text, self.pos)
        if not m:
            raise ParseError(f"expected {what}", self.pos)
        self.pos = m.end()
        return m.group(0)

    def try_punct(self, ch: str) -> bool:
        self._skip_ws()
        if self.pos < len(self.text) and self.text[self.pos] == ch:
            self.pos += 1
            return True
        return False

    def read_path_token(self) -> str:
        """A path runs to the next whitespace or comma outside double quotes."""
        self._skip_ws()
        start = self.pos
        in_quote = False
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch == '"':
                in_quote = not in_quote
            elif (ch.isspace() or ch == ",") and not in_quote:
                break
            self.pos += 1
        if self.pos == start:
            raise ParseError("expected a path", start)
        return self.text[start:self.pos]

    def read_until_keyword(self, word: str) -> tuple[str, int]:
        """Text up to a standalone (unparenthesized, unquoted) keyword."""
        start = self.pos
        pattern = re.compile(rf"(?i)(?<![A-Za-z0-9_@]){word}(?![A-Za-z0-9_])")
        m = pattern.search(self.text, self.pos)
        if not m:
            raise ParseError(f"expected {word} clause", len(self.text))
        self.pos = m.end()
        return self.text[start:m.start()], start

    def expect_end(self):
        self._skip_ws()
        if self.pos < len(self.text):
            raise ParseError(f"unexpected trailing input "
                             f"{self.text[self.pos:self.pos + 20]!r}", self.pos)


# Predicate parsing ----------------------------------------------------------

_PRED_TOKEN = re.compile(
    r"\s*(?:(?P<word>[A-Za-z_][A-Za-z0-9_]*(?:@(?:old|new))?)"
    r"|(?P<int>\d+)"
    r"|(?P<op><=|>=|<>|=|<|>|\||\(|\)|\+))"
)


def _tokenize_predicate(text: str, offset: int) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _PRED_TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"bad predicate token {text[pos:pos + 10]!r}", offset + pos)
        if m.group("word"):
            tokens.append(("WORD", m.group("word"), offset + m.start()))
        elif m.group("int"):
            tokens.append(("INT", m.group("int"), offset + m.start()))
        else:
            tokens.append(("OP", m.group("op"), offset + m.start()))
        pos = m.end()
    tokens.append(("EOF", "", offset + len(text)))
    return tokens


class _PredicateParser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def _peek(self):
        return self.tokens[self.pos]

    def _advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def _check_word(self, *words: str) -> bool:
        kind, text, _ = self._peek()
        return kind == "WORD" and text.lower() in words

    def parse(self) -> PredicateExpr:
        expr = self._parse_or()
        kind, text, pos = self._peek()
        if kind != "EOF":
            raise ParseError(f"unexpected token {text!r} in predicate", pos)
        return expr

    def _parse_or(self) -> PredicateExpr:
        node = self._parse_and()
        while self._check_word("or"):
            self._advance()
            node = BoolOp("OR", (node, self._parse_and()))
        return node

    def _parse_and(self) -> PredicateExpr:
        node = self._parse_atom()
        while self._check_word("and"):
            self._advance()
            node = BoolOp("AND", (node, self._parse_atom()))
        return node

    def _parse_atom(self) -> PredicateExpr:
        kind, text, pos = self._peek()
        if self._check_word("not"):
            # `not` opens a negation unless it spells the `not equal` operator,
            # which can only follow a term, so here it is always a negation.
            self._advance()
            return BoolOp("NOT", (self._parse_atom(),))
        if kind == "OP" and text == "(":
            self._advance()
            inner = self._parse_or()
            k, t, p = self._advance()
            if t != ")":
                raise ParseError("expected ')'", p)
            return inner
        return self._parse_comparison()

    def _parse_comparison(self) -> Comparison:
        left = self._parse_term()
        kind, text, pos = self._peek()
        if kind == "WORD" and text.lower() == "equal":
            self._advance()
            return Comparison(left, "equal", self._parse_term())
        if kind == "WORD" and text.lower() == "not":
            self._advance()
            k, t, p = self._advance()
            if not (k == "WORD" and t.lower() == "equal"):
                raise ParseError("expected 'equal' after 'not'", p)
            return Comparison(left, "not_equal", self._parse_term())
        if kind == "WORD" and text.lower() == "subset":
            self._advance()
            return Comparison(left, "subset", self._parse_term())
        if kind == "OP" and text in ("=", "<", "<=", ">", ">="):
            self._advance()
            return Comparison(left, text, self._parse_term())
        raise ParseError(f"expected a comparison operator, found {text!r}", pos)

    def _parse_term(self) -> Term:
        kind, text, pos = self._peek()
        if kind == "OP" and text == "|":
            self._advance()
            inner = self._parse_set_term()
            k, t, p = self._advance()
            if t != "|":
                raise ParseError("expected closing '|'", p)
            term: Term = CardTerm(inner)
        elif kind == "INT":
            self._advance()
            term = IntLiteral(int(text))
        elif kind == "WORD":
            term = self._parse_set_term()
        else:
            raise ParseError(f"expected a term, found {text!r}", pos)
        while True:
            kind, text, pos = self._peek()
            if kind == "OP" and text == "+":
                self._advance()
                k, t, p = self._advance()
                if k != "INT":
                    raise ParseError("expected an integer after '+'", p)
                term = PlusTerm(term, int(t))
            else:
                return term

    def _parse_set_term(self) -> SetTerm:
        kind, text, pos = self._advance()
        if kind != "WORD":
            raise ParseError(f"expected a variable, found {text!r}", pos)
        if "@" in text:
            name, version = text.split("@", 1)
            return SetTerm(name, version)
        if text.lower() in _RESERVED:
            raise ParseError(f"unexpected keyword {text!r} in predicate", pos)
        return SetTerm(text, None)


def _parse_predicate(text: str, offset: int) -> PredicateExpr:
    if not text.strip():
        raise ParseError("empty predicate", offset)
    tokens = _tokenize_predicate(text, offset)
    return _PredicateParser(tokens).parse()


def _predicate_vars(pred: PredicateExpr):
    if isinstance(pred, BoolOp):
        for operand in pred.operands:
            yield from _predicate_vars(operand)
        return
    for term in (pred.left, pred.right):
        yield from _term_vars(term)


def _term_vars(term: Term):
    if isinstance(term, SetTerm):
        yield term.var
    elif isinstance(term, CardTerm):
        yield term.inner.var
    elif isinstance(term, PlusTerm):
        yield from _term_vars(term.base)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MatchSite:
    """One aligned change position: where it is and what sits there on each side."""

    var: str
    signature: str
    old_text: str | None
    new_text: str | None


@dataclass(frozen=True)
class VarBinding:
    old_values: tuple[tuple[str, str], ...]  # (site signature, rendered subtree)
    new_values: tuple[tuple[str, str], ...]
    site_count: int


@dataclass(frozen=True)
class MatchResult:
    label: str
    bindings: Mapping[str, VarBinding]
    sites: tuple[MatchSite, ...]


def evaluate(stmt: Statement, old: Ast, new: Ast) -> MatchResult | None:
    """Match a statement over an ordered tree pair.

    Succeeds iff (a) outside the subtrees matched by the bindings the two
    trees are structurally identical, where consecutive matched siblings
    collapse into one placeholder and a placeholder may face an empty gap
    when the other tree has no placeholder under that parent, and (b) the
    predicate holds.  Deterministic and side-effect free.
    """
    old_nodes = {b.var: eval_path(b.path, old) for b in stmt.bindings}
    new_nodes = {b.var: eval_path(b.path, new) for b in stmt.bindings}
    old_marked = _outermost(old, [n for ns in old_nodes.values() for n in ns])
    new_marked = _outermost(new, [n for ns in new_nodes.values() for n in ns])
    if not _context_equal(old.root, new.root, old_marked, new_marked):
        return None

    bindings: dict[str, VarBinding] = {}
    sites: list[MatchSite] = []
    env: dict[str, _VarData] = {}
    for binding in stmt.bindings:
        var = binding.var
        site_kind = binding.path.steps[-1].kind
        grouped_old = _group_by_site(old, old_nodes[var], old_marked)
        grouped_new = _group_by_site(new, new_nodes[var], new_marked)
        keys = sorted(set(grouped_old) | set(grouped_new))
        old_vals: list[tuple[str, str]] = []
        new_vals: list[tuple[str, str]] = []
        canon_old: list[str] = []
        canon_new: list[str] = []
        site_count = 0
        for key in keys:
            parent_sig, gap = key
            signature = f"{parent_sig}/{site_kind}@{gap}"
            olds = grouped_old.get(key, [])
            news = grouped_new.get(key, [])
            site_count += max(len(olds), len(news))
            for i in range(max(len(olds), len(news))):
                o = serialize_node(olds[i]) if i < len(olds) else None
                n = serialize_node(news[i]) if i < len(news) else None
                sites.append(MatchSite(var, signature, o, n))
            old_vals.extend((signature, serialize_node(x)) for x in olds)
            new_vals.extend((signature, serialize_node(x)) for x in news)
            canon_old.extend(serialize_node(x, canonical=True) for x in olds)
            canon_new.extend(serialize_node(x, canonical=True) for x in news)
        bindings[var] = VarBinding(tuple(old_vals), tuple(new_vals), site_count)
        env[var] = _VarData(canon_old, canon_new, site_count)

    if not _eval_predicate(stmt.predicate, env):
        return None
    return MatchResult(stmt.label, bindings, tuple(sites))


@dataclass(frozen=True)
class _VarData:
    old: list[str]
    new: list[str]
    site_count: int


def _outermost(ast: Ast, nodes: list[AstNode]) -> set[int]:
    """Reduce matched nodes to those without a matched ancestor."""
    all_ids = {id(n) for n in nodes}
    keep: set[int] = set()
    parents = ast.parents
    for node in nodes:
        cursor = parents[id(node)]
        shadowed = False
        while cursor is not None:
            if id(cursor) in all_ids:
                shadowed = True
                break
            cursor = parents[id(cursor)]
        if not shadowed:
            keep.add(id(node))
    return keep


def _gap_index(parent: AstNode, child: AstNode, marked: set[int]) -> int:
    """Stable position of a matched child's placeholder group under parent.

    Directly under the root the canonical clause rank is used so the same
    clause site gets the same gap whatever other clauses a query carries;
    elsewhere it is the number of unmatched siblings before the group.
    """
    if parent.kind == "query":
        return CLAUSE_RANK.get(child.kind, len(CLAUSE_RANK))
    count = 0
    for sibling in parent.children:
        if sibling is child:
            return count
        if id(sibling) not in marked:
            count += 1
    raise ValueError("child not under parent")


def _gap_set(parent: AstNode, marked: set[int]) -> frozenset[int]:
    gaps = set()
    for child in parent.children:
        if id(child) in marked:
            gaps.add(_gap_index(parent, child, marked))
    return frozenset(gaps)


def _context_equal(a: AstNode, b: AstNode,
                   marked_a: set[int], marked_b: set[int]) -> bool:
    if not shallow_equal(a, b):
        return False
    reals_a = [c for c in a.children if id(c) not in marked_a]
    reals_b = [c for c in b.children if id(c) not in marked_b]
    if len(reals_a) != len(reals_b):
        return False
    gaps_a = _gap_set(a, marked_a)
    gaps_b = _gap_set(b, marked_b)
    if gaps_a and gaps_b and gaps_a != gaps_b:
        return False
    return all(_context_equal(x, y, marked_a, marked_b)
               for x, y in zip(reals_a, reals_b))


def _context_sig(ast: Ast, node: AstNode) -> str:
    """Root-to-node signature: kinds and attrs with values stripped, plus
    same-kind sibling ordinals."""
    parents = ast.parents
    chain: list[AstNode] = []
    cursor: AstNode | None = node
    while cursor is not None:
        chain.append(cursor)
        cursor = parents[id(cursor)]
    chain.reverse()
    steps = ["query"]
    for i in range(1, len(chain)):
        parent, this = chain[i - 1], chain[i]
        ordinal = sum(1 for sib in parent.children[:parent.children.index(this)]
                      if sib.kind == this.kind)
        attrs = "".join(f"[{k}={v}]" for k, v in sorted(this.attrs.items()))
        steps.append(f"{this.kind}{attrs}#{ordinal}")
    return "/".join(steps)


def _group_by_site(ast: Ast, nodes: list[AstNode],
                   marked: set[int]) -> dict[tuple[str, int], list[AstNode]]:
    grouped: dict[tuple[str, int], list[AstNode]] = {}
    parents = ast.parents
    order = ast.order
    for node in sorted(nodes, key=lambda n: order[id(n)]):
        parent = parents[id(node)]
        if parent is None:
            continue  # the root itself can never be a change site
        key = (_context_sig(ast, parent), _gap_index(parent, node, marked))
        grouped.setdefault(key, []).append(node)
    return grouped


def _eval_predicate(pred: PredicateExpr, env: Mapping[str, _VarData]) -> bool:
    if isinstance(pred, BoolOp):
        if pred.op == "AND":
            return all(_eval_predicate(p, env) for p in pred.operands)
        if pred.op == "OR":
            return any(_eval_predicate(p, env) for p in pred.operands)
        return not _eval_predicate(pred.operands[0], env)
    if pred.op in ("equal", "not_equal", "subset"):
        left = _eval_set(pred.left, env)
        right = _eval_set(pred.right, env)
        if pred.op == "equal":
            return left == right
        if pred.op == "not_equal":
            return left != right
        return left <= right
    left_i = _eval_int(pred.left, env)
    right_i = _eval_int(pred.right, env)
    return {
        "=": left_i == right_i,
        "<": left_i < right_i,
        "<=": left_i <= right_i,
        ">": left_i > right_i,
        ">=": left_i >= right_i,
    }[pred.op]


def _eval_set(term: Term, env: Mapping[str, _VarData]) -> frozenset[str]:
    if not isinstance(term, SetTerm):
        raise TypeMismatchError(
            f"set operator applied to integer term {term!r}")
    data = env[term.var]
    if term.version == "old":
        return frozenset(data.old)
    if term.version == "new":
        return frozenset(data.new)
    return frozenset(data.old) | frozenset(data.new)


def _eval_int(term: Term, env: Mapping[str, _VarData]) -> int:
    if isinstance(term, IntLiteral):
        return term.value
    if isinstance(term, PlusTerm):
        return _eval_int(term.base, env) + term.addend
    if isinstance(term, CardTerm):
        data = env[term.inner.var]
        if term.inner.version == "old":
            return len(data.old)
        if term.inner.version == "new":
            return len(data.new)
        return data.site_count
    raise TypeMismatchError(f"integer comparison applied to set term {term!r}")
