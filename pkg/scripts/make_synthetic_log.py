#!/usr/bin/env python3
"""Emit a synthetic query log from planted widget templates, for experiments
where the right interface is known in advance.

Example:
    python3 scripts/make_synthetic_log.py --clusters 3 --steps 20 \
        --seed 7 --out out/synthetic.sql
"""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from precis.synthlog import ClusterSpec, generate_log

SHAPES = [
    ClusterSpec(table="flights", filter_column="state",
                filter_values=("NY", "CA", "TX", "WA"),
                threshold_values=("100", "200", "300", "400", "500"),
                top_toggle=True),
    ClusterSpec(table="sales", filter_column="country",
                filter_values=("US", "UK", "FR"), top_toggle=True),
    ClusterSpec(table="delays", threshold_column="distance",
                threshold_values=("10", "25", "40"),
                filter_values=("JFK", "LAX")),
]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--clusters", type=int, default=3, choices=(1, 2, 3))
    parser.add_argument("--steps", type=int, default=20,
                        help="random-walk steps per cluster")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="out/synthetic.sql")
    args = parser.parse_args()

    log = generate_log(SHAPES[:args.clusters], args.steps, random.Random(args.seed))
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(log.text(), encoding="utf-8")
    print(f"wrote {len(log.sources)} statements "
          f"({sum(log.distinct_per_cluster)} distinct) to {out}")
    print("planted slots per cluster:",
          ", ".join(str(c.slot_count()) for c in log.clusters))
    return 0


if __name__ == "__main__":
    sys.exit(main())
