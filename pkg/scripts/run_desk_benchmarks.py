#!/usr/bin/env python3
"""Run every desk-scale benchmark config and collect the tables."""

import argparse
import sys
from pathlib import Path

from apfeas.cli import main as cli_main

CONFIG_DIR = Path(__file__).parent / "configs"


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="bench_out",
                        help="root output directory")
    parser.add_argument("--only", nargs="*", default=None,
                        help="config stems to run (default: all)")
    args = parser.parse_args()

    configs = sorted(CONFIG_DIR.glob("*.yaml"))
    if args.only:
        configs = [c for c in configs if c.stem in args.only]
    if not configs:
        print("no configs selected", file=sys.stderr)
        return 1

    worst = 0
    for cfg_path in configs:
        sub = Path(args.out) / cfg_path.stem
        print(f"=== {cfg_path.stem} -> {sub}")
        rc = cli_main(["bench", str(cfg_path), "--out", str(sub)])
        worst = max(worst, rc)

    print("\ncombined tables:")
    for cfg_path in configs:
        table = Path(args.out) / cfg_path.stem / "bench_table.txt"
        if table.exists():
            print(f"\n--- {cfg_path.stem}")
            print(table.read_text(), end="")
    return worst


if __name__ == "__main__":
    sys.exit(main())
