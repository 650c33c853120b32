"""precis: mine SQL query logs for micro-changes and generate interactive interfaces."""

from .ast import Ast, AstNode, SourceQuery, serialize
from .sqlparser import parse_log, parse_query

__all__ = ["Ast", "AstNode", "SourceQuery", "parse_log", "parse_query", "serialize"]
