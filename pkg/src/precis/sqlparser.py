"""Recursive-descent parser for the supported SQL subset.

Covers: SELECT list (columns, `*`, function calls, AS aliases, TOP n),
FROM with optional table aliases, WHERE/HAVING comparison expressions,
GROUP BY (columns or ordinals), ORDER BY, LIMIT.  Parsing is pure and
stateless; queries may be parsed concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ast import Ast, AstNode, SourceQuery
from .errors import AllStatementsFailedError, EmptyInputError, ParseError

KEYWORDS = {
    "SELECT", "TOP", "FROM", "WHERE", "GROUP", "BY", "HAVING",
    "ORDER", "LIMIT", "AS", "AND", "OR", "NOT", "BETWEEN", "ASC", "DESC",
}

_COMPARISON_OPS = {"=", "<>", "<", "<=", ">", ">="}


@dataclass(frozen=True)
class Token:
    kind: str  # KEYWORD | IDENT | QIDENT | STRING | NUMBER | OP | PUNCT | EOF
    text: str
    position: int


def strip_comments(text: str) -> str:
    """Remove `--` line comments, preserving character positions with spaces."""
    out = []
    i, n = 0, len(text)
    in_string = False
    in_quote = False
    while i < n:
        ch = text[i]
        if in_string:
            if ch == "'":
                in_string = False
            out.append(ch)
        elif in_quote:
            if ch == '"':
                in_quote = False
            out.append(ch)
        elif ch == "'":
            in_string = True
            out.append(ch)
        elif ch == '"':
            in_quote = True
            out.append(ch)
        elif ch == "-" and i + 1 < n and text[i + 1] == "-":
            while i < n and text[i] != "\n":
                out.append(" ")
                i += 1
            continue
        else:
            out.append(ch)
        i += 1
    return "".join(out)


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        start = i
        if ch == "'":
            i += 1
            while i < n and text[i] != "'":
                i += 1
            if i >= n:
                raise ParseError("unterminated string literal", start)
            i += 1
            tokens.append(Token("STRING", text[start:i], start))
        elif ch == '"':
            i += 1
            while i < n and text[i] != '"':
                i += 1
            if i >= n:
                raise ParseError("unterminated quoted identifier", start)
            i += 1
            tokens.append(Token("QIDENT", text[start:i], start))
        elif ch.isdigit():
            i += 1
            while i < n and (text[i].isdigit() or text[i] == "."):
                i += 1
            tokens.append(Token("NUMBER", text[start:i], start))
        elif ch.isalpha() or ch == "_":
            i += 1
            while i < n and (text[i].isalnum() or text[i] == "_"):
                i += 1
            word = text[start:i]
            if word.upper() in KEYWORDS:
                tokens.append(Token("KEYWORD", word.upper(), start))
            else:
                tokens.append(Token("IDENT", word, start))
        elif ch in "<>=":
            if text[i:i + 2] in ("<>", "<=", ">="):
                tokens.append(Token("OP", text[i:i + 2], start))
                i += 2
            else:
                tokens.append(Token("OP", ch, start))
                i += 1
        elif ch in "(),.*;":
            tokens.append(Token("PUNCT", ch, start))
            i += 1
        else:
            raise ParseError(f"unexpected character {ch!r}", i)
    tokens.append(Token("EOF", "", n))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    # -- token helpers ------------------------------------------------------

    def _peek(self) -> Token:
        return self.tokens[self.pos]

    def _advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def _check(self, kind: str, text: str | None = None) -> bool:
        tok = self._peek()
        return tok.kind == kind and (text is None or tok.text == text)

    def _match(self, kind: str, text: str | None = None) -> Token | None:
        if self._check(kind, text):
            return self._advance()
        return None

    def _expect(self, kind: str, text: str | None = None, what: str = "") -> Token:
        tok = self._match(kind, text)
        if tok is None:
            got = self._peek()
            want = what or text or kind
            raise ParseError(f"expected {want}, found {got.text or 'end of input'!r}", got.position)
        return tok

    # -- grammar ------------------------------------------------------------

    def parse_query(self) -> AstNode:
        start = self._peek().position
        self._expect("KEYWORD", "SELECT")
        top = None
        if self._match("KEYWORD", "TOP"):
            num = self._expect("NUMBER", what="number after TOP")
            top = AstNode("topclause", children=(self._num_node(num),),
                          span=(num.position, num.position + len(num.text)))
        project = self._parse_select_list()
        clauses: list[AstNode] = [project]
        self._expect("KEYWORD", "FROM")
        clauses.append(self._parse_from())
        if self._match("KEYWORD", "WHERE"):
            clauses.append(AstNode("where", children=(self._parse_expr(),)))
        if self._match("KEYWORD", "GROUP"):
            self._expect("KEYWORD", "BY")
            clauses.append(self._parse_groupby())
        if self._match("KEYWORD", "HAVING"):
            clauses.append(AstNode("having", children=(self._parse_expr(),)))
        if self._match("KEYWORD", "ORDER"):
            self._expect("KEYWORD", "BY")
            clauses.append(self._parse_orderby())
        if self._match("KEYWORD", "LIMIT"):
            num = self._expect("NUMBER", what="number after LIMIT")
            clauses.append(AstNode("limitclause", children=(self._num_node(num),)))
        if top is not None:
            clauses.append(top)
        end_tok = self._peek()
        if end_tok.kind != "EOF":
            raise ParseError(f"unexpected input {end_tok.text!r} after query", end_tok.position)
        return AstNode("query", children=tuple(clauses), span=(start, end_tok.position))

    def _num_node(self, tok: Token) -> AstNode:
        return AstNode("numliteral", value=tok.text,
                       span=(tok.position, tok.position + len(tok.text)))

    def _parse_select_list(self) -> AstNode:
        items = [self._parse_select_item()]
        while self._match("PUNCT", ","):
            items.append(self._parse_select_item())
        return AstNode("project", children=tuple(items))

    def _parse_select_item(self) -> AstNode:
        star = self._match("PUNCT", "*")
        if star:
            child = AstNode("star", span=(star.position, star.position + 1))
            return AstNode("projectclause", children=(child,), span=child.span)
        item = self._parse_value()
        children = [item]
        if self._match("KEYWORD", "AS"):
            children.append(self._parse_alias(explicit_as=True))
        return AstNode("projectclause", children=tuple(children))

    def _parse_from(self) -> AstNode:
        tables = [self._parse_tableclause()]
        while self._match("PUNCT", ","):
            tables.append(self._parse_tableclause())
        return AstNode("from", children=tuple(tables))

    def _parse_tableclause(self) -> AstNode:
        name, span = self._parse_qualified_name("table name")
        children = [AstNode("tablename", value=name, span=span)]
        if self._match("KEYWORD", "AS"):
            children.append(self._parse_alias(explicit_as=True))
        elif self._check("IDENT") or self._check("QIDENT"):
            children.append(self._parse_alias(explicit_as=False))
        return AstNode("tableclause", children=tuple(children))

    def _parse_alias(self, explicit_as: bool) -> AstNode:
        tok = self._match("IDENT") or self._match("QIDENT")
        if tok is None:
            got = self._peek()
            raise ParseError("expected alias name", got.position)
        attrs = {"as": "1"} if explicit_as else {}
        return AstNode("alias", attrs=attrs, value=tok.text,
                       span=(tok.position, tok.position + len(tok.text)))

    def _parse_qualified_name(self, what: str) -> tuple[str, tuple[int, int]]:
        tok = self._match("IDENT") or self._match("QIDENT")
        if tok is None:
            got = self._peek()
            raise ParseError(f"expected {what}", got.position)
        parts = [tok.text]
        end = tok.position + len(tok.text)
        while self._check("PUNCT", ".") :
            self._advance()
            nxt = self._match("IDENT") or self._match("QIDENT")
            if nxt is None:
                got = self._peek()
                raise ParseError(f"expected identifier after '.' in {what}", got.position)
            parts.append(nxt.text)
            end = nxt.position + len(nxt.text)
        return ".".join(parts), (tok.position, end)

    # Expressions: OR < AND < NOT < comparison.

    def _parse_expr(self) -> AstNode:
        return self._parse_or()

    def _parse_or(self) -> AstNode:
        node = self._parse_and()
        while self._match("KEYWORD", "OR"):
            right = self._parse_and()
            node = AstNode("expr", attrs={"op": "OR"}, children=(node, right))
        return node

    def _parse_and(self) -> AstNode:
        node = self._parse_not()
        while self._match("KEYWORD", "AND"):
            right = self._parse_not()
            node = AstNode("expr", attrs={"op": "AND"}, children=(node, right))
        return node

    def _parse_not(self) -> AstNode:
        if self._match("KEYWORD", "NOT"):
            operand = self._parse_not()
            return AstNode("expr", attrs={"op": "NOT"}, children=(operand,))
        return self._parse_comparison()

    def _parse_comparison(self) -> AstNode:
        left = self._parse_primary()
        op = self._peek()
        if op.kind == "OP" and op.text in _COMPARISON_OPS:
            self._advance()
            right = self._parse_primary()
            return AstNode("expr", attrs={"op": op.text}, children=(left, right))
        if self._match("KEYWORD", "BETWEEN"):
            low = self._parse_primary()
            self._expect("KEYWORD", "AND")
            high = self._parse_primary()
            return AstNode("expr", attrs={"op": "BETWEEN"}, children=(left, low, high))
        return left

    def _parse_primary(self) -> AstNode:
        paren = self._match("PUNCT", "(")
        if paren:
            inner = self._parse_expr()
            self._expect("PUNCT", ")")
            attrs = dict(inner.attrs)
            if inner.kind == "expr":
                attrs["paren"] = "1"
                return AstNode("expr", attrs=attrs, value=inner.value,
                               children=inner.children, span=inner.span)
            return inner  # parenthesized atom: parens carry no structure
        return self._parse_value()

    def _parse_value(self) -> AstNode:
        tok = self._peek()
        if tok.kind == "STRING":
            self._advance()
            return AstNode("strliteral", value=tok.text[1:-1],
                           span=(tok.position, tok.position + len(tok.text)))
        if tok.kind == "NUMBER":
            self._advance()
            return self._num_node(tok)
        if tok.kind in ("IDENT", "QIDENT"):
            if tok.kind == "IDENT" and self.tokens[self.pos + 1].text == "(":
                return self._parse_funccall()
            name, span = self._parse_qualified_name("column reference")
            return AstNode("columnref", value=name, span=span)
        raise ParseError(f"expected value, found {tok.text or 'end of input'!r}", tok.position)

    def _parse_funccall(self) -> AstNode:
        name = self._advance()
        self._expect("PUNCT", "(")
        args: list[AstNode] = []
        if not self._check("PUNCT", ")"):
            args.append(self._parse_expr())
            while self._match("PUNCT", ","):
                args.append(self._parse_expr())
        close = self._expect("PUNCT", ")")
        return AstNode("funccall", attrs={"name": name.text.upper()},
                       children=tuple(args), span=(name.position, close.position + 1))

    def _parse_groupby(self) -> AstNode:
        items = [self._parse_group_item()]
        while self._match("PUNCT", ","):
            items.append(self._parse_group_item())
        return AstNode("groupby", children=tuple(items))

    def _parse_group_item(self) -> AstNode:
        num = self._match("NUMBER")
        child = self._num_node(num) if num else self._parse_value()
        return AstNode("groupitem", children=(child,))

    def _parse_orderby(self) -> AstNode:
        items = [self._parse_order_item()]
        while self._match("PUNCT", ","):
            items.append(self._parse_order_item())
        return AstNode("orderby", children=tuple(items))

    def _parse_order_item(self) -> AstNode:
        num = self._match("NUMBER")
        child = self._num_node(num) if num else self._parse_value()
        direction = self._match("KEYWORD", "ASC") or self._match("KEYWORD", "DESC")
        attrs = {"dir": direction.text} if direction else {}
        return AstNode("orderitem", attrs=attrs, children=(child,))


def parse_query(text: str) -> Ast:
    """Parse one SQL statement of the supported subset into an Ast."""
    cleaned = strip_comments(text)
    if not cleaned.strip():
        raise EmptyInputError("empty query text", 0)
    tokens = tokenize(cleaned)
    if len(tokens) >= 2 and tokens[-2].kind == "PUNCT" and tokens[-2].text == ";":
        del tokens[-2]
    root = _Parser(tokens).parse_query()
    return Ast.from_root(root)


@dataclass(frozen=True)
class LogDiagnostic:
    """A statement that failed to parse: raw position in the log and the error."""

    statement_index: int
    text: str
    error: str


def split_statements(text: str) -> list[str]:
    """Split log text on `;` outside literals; comments already stripped."""
    statements: list[str] = []
    current: list[str] = []
    in_string = False
    in_quote = False
    for ch in text:
        if ch == ";" and not in_string and not in_quote:
            statements.append("".join(current))
            current = []
            continue
        if ch == "'" and not in_quote:
            in_string = not in_string
        elif ch == '"' and not in_string:
            in_quote = not in_quote
        current.append(ch)
    statements.append("".join(current))
    return [s for s in (s.strip() for s in statements) if s]


def parse_log(text: str) -> tuple[list[tuple[SourceQuery, Ast]], list[LogDiagnostic]]:
    """Parse a whole log: semicolon-terminated statements, `--` comments.

    Parse failures are collected per statement instead of aborting; raises
    AllStatementsFailedError only when no statement parses.
    """
    cleaned = strip_comments(text)
    raw_statements = split_statements(cleaned)
    entries: list[tuple[SourceQuery, Ast]] = []
    diagnostics: list[LogDiagnostic] = []
    for raw_index, statement in enumerate(raw_statements):
        try:
            ast = parse_query(statement)
        except ParseError as exc:
            diagnostics.append(LogDiagnostic(raw_index, statement, str(exc)))
            continue
        entries.append((SourceQuery(statement, len(entries)), ast))
    if raw_statements and not entries:
        raise AllStatementsFailedError(
            f"none of the {len(raw_statements)} statements parsed")
    return entries, diagnostics
