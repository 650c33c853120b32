#!/usr/bin/env python3
"""Sweep the complexity budget over a mined graph and tabulate how coverage
and the interaction objective respond.

Example:
    python3 scripts/budget_sweep.py --graph out/graph.json --max-budget 12
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from precis.generator import greedy_optimize, group_transformations
from precis.interface import populate_widgets
from precis.miner import import_graph
from precis.widgets import CostModel, default_library


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--graph", required=True)
    parser.add_argument("--max-budget", type=float, default=12.0)
    parser.add_argument("--step", type=float, default=1.0)
    parser.add_argument("--pairs", choices=("adjacent", "all"), default="adjacent")
    args = parser.parse_args()

    graph = import_graph(Path(args.graph).read_text(encoding="utf-8"))
    groups = group_transformations(graph)
    library = default_library()
    print(f"{'budget':>8}  {'C_c':>6}  {'C_e':>10}  {'coverage':>10}  widgets")
    budget = 0.0
    while budget <= args.max_budget + 1e-9:
        cost = CostModel(s_max=budget, pair_universe=args.pairs)
        mapping = greedy_optimize(graph, groups, library, cost)
        spec = populate_widgets(mapping, graph)
        cov = spec.stats["coverage"]
        kinds = ",".join(sorted(w.id for _, w in mapping.assignments)) or "-"
        print(f"{budget:>8.1f}  {mapping.c_c:>6.1f}  {mapping.c_e:>10.3f}  "
              f"{cov['covered']:>4}/{cov['total']:<5}  {kinds}")
        budget += args.step
    return 0


if __name__ == "__main__":
    sys.exit(main())
