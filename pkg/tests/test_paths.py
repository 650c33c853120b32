"""Path parsing and evaluation over query trees."""

from __future__ import annotations

import pytest

from precis.errors import ParseError, UnknownKindError
from precis.paths import NodePath, PathStep, eval_path, parse_path
from precis.sqlparser import parse_query

from conftest import Q1, Q5


class TestParsePath:
    def test_steps_and_axes(self):
        path = parse_path('where//expr[op="="]//strliteral')
        assert [s.kind for s in path.steps] == ["where", "expr", "strliteral"]
        assert [s.axis for s in path.steps] == ["descendant"] * 3
        assert path.steps[1].predicates == (("op", "="),)

    def test_child_axis(self):
        path = parse_path("project/projectclause")
        assert path.steps[1].axis == "child"

    def test_unknown_kind(self):
        with pytest.raises(UnknownKindError):
            parse_path("where//banana")

    def test_malformed(self):
        with pytest.raises(ParseError):
            parse_path("where//")
        with pytest.raises(ParseError):
            parse_path("")


class TestEvalPath:
    def test_string_literal_under_equality(self):
        ast = parse_query(Q1)
        nodes = eval_path(parse_path('where//expr[op="="]//strliteral'), ast)
        assert [n.value for n in nodes] == ["US"]

    def test_tablename(self):
        ast = parse_query("SELECT * FROM Clients")
        nodes = eval_path(parse_path("from//tableclause//tablename"), ast)
        assert [n.value for n in nodes] == ["Clients"]

    def test_missing_clause_yields_empty(self):
        ast = parse_query("SELECT * FROM t")
        assert eval_path(parse_path('where//expr[op="="]//strliteral'), ast) == []

    def test_document_order_and_purity(self):
        ast = parse_query(Q5)
        path = parse_path("project//projectclause")
        first = eval_path(path, ast)
        second = eval_path(path, ast)
        assert first == second
        texts = [c.children[0].value for c in first]
        assert texts == ["region", "revenue"]

    def test_predicate_filters(self):
        ast = parse_query("SELECT * FROM t WHERE a = 'x' AND b > 2")
        eq = eval_path(parse_path('where//expr[op="="]'), ast)
        gt = eval_path(parse_path('where//expr[op=">"]'), ast)
        assert len(eq) == 1 and len(gt) == 1

    def test_unknown_kind_in_handbuilt_path(self):
        ast = parse_query(Q1)
        step = PathStep("descendant", "query")
        bogus = object.__new__(NodePath)
        object.__setattr__(bogus, "steps", (step, PathStep("descendant", "nonsense"),))
        object.__setattr__(bogus, "text", "query//nonsense")
        with pytest.raises(UnknownKindError):
            eval_path(bogus, ast)
