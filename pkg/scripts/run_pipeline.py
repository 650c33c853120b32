#!/usr/bin/env python3
"""Run the whole pipeline on one log: mine, generate, report.

Example:
    python3 scripts/run_pipeline.py --log fixtures/fig1a.sql \
        --statements fixtures/basic.pilang --budget 10 --outdir out/
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from precis.cli import main as cli_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--log", required=True)
    parser.add_argument("--statements", required=True)
    parser.add_argument("--budget", type=float, default=10.0)
    parser.add_argument("--pairing", default="auto")
    parser.add_argument("--outdir", default="out")
    args = parser.parse_args()

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    graph = outdir / "graph.json"
    dot = outdir / "graph.dot"
    interface = outdir / "interface.json"

    code = cli_main(["mine", "--log", args.log, "--statements", args.statements,
                     "--pairing", args.pairing, "--out", str(graph), "--dot", str(dot)])
    if code == 1:
        return code
    code = max(code, cli_main(["generate", "--graph", str(graph),
                               "--budget", str(args.budget), "--out", str(interface)]))
    print(f"wrote {graph}, {dot}, {interface}")
    print(f"next: precis serve --interface {interface}")
    return code


if __name__ == "__main__":
    sys.exit(main())
