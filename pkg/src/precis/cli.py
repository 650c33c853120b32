"""Command-line pipeline: mine a log into a transformation graph, generate an
interface spec from it, and serve the result."""

from __future__ import annotations

import argparse
import json
import os
import sys

from .errors import AllStatementsFailedError, PrecisError, SchemaError
from .generator import greedy_optimize, group_transformations
from .interface import InterfaceSpec, populate_widgets
from .miner import MiningConfig, export_graph, import_graph, mine
from .pilang import parse_library
from .sqlparser import parse_log
from .server import Backend, make_server
from .widgets import CostModel, default_library


def _parse_pairing(text: str) -> MiningConfig:
    if text in ("adjacent", "all", "auto"):
        return MiningConfig(text)
    if text.startswith("window:"):
        return MiningConfig("window", window=int(text.split(":", 1)[1]))
    raise argparse.ArgumentTypeError(
        f"pairing must be adjacent, all, auto or window:k, not {text!r}")


def cmd_mine(args) -> int:
    try:
        log_text = open(args.log, encoding="utf-8").read()
    except OSError as exc:
        print(f"error: cannot read log {args.log}: {exc}", file=sys.stderr)
        return 1
    try:
        statements_text = open(args.statements, encoding="utf-8").read()
    except OSError as exc:
        print(f"error: cannot read statements {args.statements}: {exc}", file=sys.stderr)
        return 1
    try:
        library = parse_library(statements_text)
        entries, diagnostics = parse_log(log_text)
    except (PrecisError, AllStatementsFailedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    graph = mine(entries, library, args.pairing)
    with open(args.out, "w", encoding="utf-8") as handle:
        handle.write(export_graph(graph, "json"))
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as handle:
            handle.write(export_graph(graph, "dot"))
    labels = sorted({e.label for e in graph.edges})
    print(f"nodes: {len(graph.nodes)}  edges: {len(graph.edges)}  "
          f"labels: {len(labels)}"
          + (f" ({', '.join(labels)})" if labels else ""))
    for diag in diagnostics:
        print(f"warning: statement {diag.statement_index} skipped: {diag.error}",
              file=sys.stderr)
    return 2 if diagnostics else 0


def _load_costs(path: str | None):
    if path is None:
        return {}, False, None
    with open(path, encoding="utf-8") as handle:
        data = json.load(handle)
    include_button = bool(data.pop("include_button", False))
    penalty = data.pop("penalty", None)
    overrides = {kind: spec for kind, spec in data.items() if isinstance(spec, dict)}
    return overrides, include_button, penalty


def cmd_generate(args) -> int:
    try:
        graph_text = open(args.graph, encoding="utf-8").read()
    except OSError as exc:
        print(f"error: cannot read graph {args.graph}: {exc}", file=sys.stderr)
        return 1
    try:
        graph = import_graph(graph_text)
    except SchemaError as exc:
        print(f"error: malformed graph JSON: {exc}", file=sys.stderr)
        return 1
    try:
        overrides, include_button, penalty = _load_costs(args.costs)
        library = default_library(include_button=include_button, overrides=overrides)
        cost = CostModel(s_max=args.budget, penalty=penalty, pair_universe=args.pairs)
        groups = group_transformations(graph)
        mapping = greedy_optimize(graph, groups, library, cost)
        spec = populate_widgets(mapping, graph)
    except (PrecisError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    with open(args.out, "w", encoding="utf-8") as handle:
        handle.write(spec.to_json())
    cov = spec.stats["coverage"]
    print(f"coverage: {cov['covered']}/{cov['total']} distinct queries  "
          f"C_e: {spec.stats['C_e']:.4f}  C_c: {spec.stats['C_c']:.4f}  "
          f"(budget {args.budget})")
    return 0


def cmd_serve(args) -> int:
    try:
        spec = InterfaceSpec.from_json(open(args.interface, encoding="utf-8").read())
    except OSError as exc:
        print(f"error: cannot read interface {args.interface}: {exc}", file=sys.stderr)
        return 1
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        backend = Backend.parse(args.exec_backend)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    port = args.port if args.port is not None else \
        int(os.environ.get("PRECIS_PORT", "8765"))
    server = make_server(spec, port, backend, permissive=args.permissive,
                         static_dir=args.static)
    actual_port = server.server_address[1]
    print(f"serving {len(spec.panels)} panel(s) on http://localhost:{actual_port}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        print("shutting down")
    finally:
        server.server_close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="precis",
        description="Generate interactive interfaces from SQL query logs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_mine = sub.add_parser("mine", help="mine a query log into a transformation graph")
    p_mine.add_argument("--log", required=True)
    p_mine.add_argument("--statements", required=True)
    p_mine.add_argument("--pairing", type=_parse_pairing, default=MiningConfig("auto"))
    p_mine.add_argument("--out", required=True)
    p_mine.add_argument("--dot")
    p_mine.set_defaults(func=cmd_mine)

    p_gen = sub.add_parser("generate", help="solve the widget mapping and emit the interface spec")
    p_gen.add_argument("--graph", required=True)
    p_gen.add_argument("--budget", type=float, required=True)
    p_gen.add_argument("--costs")
    p_gen.add_argument("--pairs", choices=("adjacent", "all"), default="adjacent")
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(func=cmd_generate)

    p_serve = sub.add_parser("serve", help="host the interface spec and a query endpoint")
    p_serve.add_argument("--interface", required=True)
    p_serve.add_argument("--port", type=int, default=None)
    p_serve.add_argument("--exec-backend", default="echo")
    p_serve.add_argument("--permissive", action="store_true")
    p_serve.add_argument("--static", help="directory of UI files to serve at /")
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
