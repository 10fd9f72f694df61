#!/usr/bin/env python3
"""Tabulate the wrong/correct discrepancies: coefficients for orders 2..5,
then the dynamical squeezing and conversion ratios for the three-wave case."""

import argparse
from pathlib import Path

from dquant.dynamics import compare_schemes
from dquant.serialize import csv_text, write_text


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-order", type=int, default=5)
    parser.add_argument("--out", type=Path, default=None, help="optional CSV path")
    args = parser.parse_args()

    rows = []
    print(f"{'observable':<14} {'order':<6} {'ratio':<22} {'expected':<10} pass")
    for order in range(2, args.max_order + 1):
        rep = compare_schemes("coefficient", order)
        print(f"{rep.observable:<14} {rep.order:<6} {rep.ratio:<22.15g} "
              f"{rep.expected_ratio:<10g} {rep.passed}")
        rows.append((rep.observable, str(rep.order), rep.ratio, rep.expected_ratio))
    for observable in ("squeezing", "conversion"):
        rep = compare_schemes(observable, 2)
        print(f"{rep.observable:<14} {rep.order:<6} {rep.ratio:<22.15g} "
              f"{rep.expected_ratio:<10g} {rep.passed}")
        rows.append((rep.observable, str(rep.order), rep.ratio, rep.expected_ratio))

    if args.out:
        text = csv_text(["observable", "order", "ratio", "expected"],
                        [(o, n, r, e) for o, n, r, e in rows])
        write_text(args.out, text)
        print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
