#!/usr/bin/env python3
"""Offset area and cost for a footprint across restoration scenarios.

Prints one row per scenario, then a sweep over the offsetting horizon and the
continuous/discrete averaging conventions for a gain derived from c0.
"""

from __future__ import annotations

import argparse

from biovalent.footprint import format_bde
from biovalent.offsets import OffsetScenario, quote_offset

SCENARIOS = (
    OffsetScenario("Finland", "FIN", land_price=7548, gain=3.97e-18),
    OffsetScenario("Brazil", "BRA", land_price=901, gain=3.42e-16),
    OffsetScenario("Finland (c0)", "FIN", land_price=7548, c0=2.65e-17),
)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--footprint", type=float, default=68.79e-9, help="BDe to offset")
    ap.add_argument("--horizons", type=float, nargs="+", default=[10, 20, 30, 50, 100])
    args = ap.parse_args()

    print(f"footprint {format_bde(args.footprint)}")
    print(f"{'scenario':<14}{'gain BDe/m2':>13}{'area ha':>16}{'total EUR':>20}{'annual EUR':>18}")
    for sc in SCENARIOS:
        q = quote_offset(sc, args.footprint)
        print(f"{sc.name:<14}{q.average_gain:>13.4g}{q.required_area:>16,.0f}{q.total_cost:>20,.0f}"
              f"{q.annual_cost:>18,.0f}")

    print()
    print("horizon sweep, c0 = 2.65e-17, t_rec = 100, Finland land price")
    print(f"{'H':>5}{'gain (cont.)':>14}{'gain (disc.)':>14}{'annual EUR (cont.)':>22}")
    for h in args.horizons:
        cont = OffsetScenario("c", "FIN", land_price=7548, c0=2.65e-17, horizon=h)
        disc = OffsetScenario("d", "FIN", land_price=7548, c0=2.65e-17, horizon=h, discrete=True)
        print(f"{h:>5.0f}{cont.average_gain:>14.4g}{disc.average_gain:>14.4g}"
              f"{quote_offset(cont, args.footprint).annual_cost:>22,.0f}")


if __name__ == "__main__":
    main()
