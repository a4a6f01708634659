#!/usr/bin/env python3
"""Run the bundled end-to-end demo and print where the report landed.

Equivalent to `blindeval demo <dir> --seed <seed>`: four cases, three
reader roles, two mock judge models, statistics and report.
"""

from __future__ import annotations

import argparse
import sys

from blindeval.cli import main as cli_main


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("target", nargs="?", default="demo-run")
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()
    code = cli_main(["demo", args.target, "--seed", str(args.seed)])
    if code == 0:
        print(f"\nopen {args.target}/report/report.md for the summary")
    return code


if __name__ == "__main__":
    sys.exit(main())
