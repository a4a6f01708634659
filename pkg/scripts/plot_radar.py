#!/usr/bin/env python3
"""Render report/radar.csv as a radar chart (requires matplotlib).

The pipeline itself only emits figure-ready CSVs; this stub turns the
dimension-by-candidate means into the usual spider plot.
"""

from __future__ import annotations

import argparse
import csv
import math
from pathlib import Path


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("radar_csv", help="path to report/radar.csv")
    parser.add_argument("-o", "--out", default="radar.png")
    args = parser.parse_args()

    try:
        import matplotlib.pyplot as plt
    except ImportError:
        raise SystemExit("matplotlib is not installed; pip install matplotlib")

    rows = list(csv.DictReader(Path(args.radar_csv).open(encoding="utf-8")))
    dimensions = list(dict.fromkeys(r["dimension"] for r in rows))
    candidates = sorted({r["candidate"] for r in rows})
    means = {(r["dimension"], r["candidate"]): float(r["mean"]) for r in rows}

    angles = [2 * math.pi * i / len(dimensions) for i in range(len(dimensions))]
    angles.append(angles[0])

    fig, ax = plt.subplots(figsize=(7, 7), subplot_kw=dict(polar=True))
    for candidate in candidates:
        values = [means.get((d, candidate), float("nan")) for d in dimensions]
        values.append(values[0])
        ax.plot(angles, values, linewidth=2, label=candidate)
        ax.fill(angles, values, alpha=0.08)
    ax.set_thetagrids([math.degrees(a) for a in angles[:-1]], dimensions)
    ax.set_ylim(1, 5)
    ax.set_rgrids([1, 2, 3, 4, 5])
    ax.legend(loc="upper right", bbox_to_anchor=(1.25, 1.05))
    fig.savefig(args.out, bbox_inches="tight", dpi=150)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
