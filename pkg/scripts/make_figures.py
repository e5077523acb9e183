"""Emit every plot-ready data table into an output directory.

Produces fig1.csv (copies vs angle), fig2.csv (copies vs infidelity),
figS1.csv (reachable-region boundary), figS2.csv (family landscape).
Each table matches `qverify figure --which ...` output minus metadata.
"""

import argparse
import csv
import math
import pathlib

import numpy as np

from qverify.adversary import (
    HULL_COLUMNS,
    LANDSCAPE_COLUMNS,
    hull_boundary,
    landscape,
)
from qverify.samplecount import (
    FIG1_COLUMNS,
    FIG2_COLUMNS,
    fig1_csv_rows,
    fig2_csv_rows,
    figure1_data,
    figure2_data,
)


def write_table(path, columns, rows):
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(columns)
        writer.writerows(rows)
    print(f"wrote {path} ({len(rows)} rows)")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="figures", help="output directory")
    parser.add_argument(
        "--theta", type=float, default=math.pi / 8,
        help="angle for fig2/figS1/figS2",
    )
    parser.add_argument("--epsilon", type=float, default=0.01)
    parser.add_argument("--delta", type=float, default=0.1)
    parser.add_argument(
        "--points", type=int, default=200, help="angle grid size for fig1"
    )
    args = parser.parse_args()

    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    rows = figure1_data(args.epsilon, args.delta)
    write_table(outdir / "fig1.csv", FIG1_COLUMNS, fig1_csv_rows(rows))

    eps_grid = np.logspace(-4, -1, 60)
    rows = figure2_data(args.theta, args.delta, epsilons=eps_grid)
    write_table(outdir / "fig2.csv", FIG2_COLUMNS, fig2_csv_rows(rows))

    hull = hull_boundary(args.theta)
    write_table(outdir / "figS1.csv", HULL_COLUMNS, hull)

    report = landscape(args.theta)
    grid = [
        (r.alpha, r.phi, r.lambda1, r.lambda2, r.qmax) for r in report.rows
    ]
    write_table(outdir / "figS2.csv", LANDSCAPE_COLUMNS, grid)
    print(
        f"landscape minimum qmax {report.min_qmax!r} at "
        f"alpha={report.argmin_alpha!r}, phi={report.argmin_phi!r}"
    )


if __name__ == "__main__":
    main()
