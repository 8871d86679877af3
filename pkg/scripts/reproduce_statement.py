#!/usr/bin/env python3
"""Rebuild the bundled 2023 reference impact statement from its line items and print it."""

from __future__ import annotations

import argparse
import json

from biovalent.config import CASE_STATEMENT, load_statement_case
from biovalent.statement import net_positions, render_text, statement_record


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--case", default=str(CASE_STATEMENT))
    ap.add_argument("--json", action="store_true", help="print the full-precision record instead")
    args = ap.parse_args()
    st = load_statement_case(args.case)
    if args.json:
        print(json.dumps(statement_record(st), indent=2))
        return
    print(render_text(st), end="")
    print()
    print(f"carbon offset cost (not deducted): {st.carbon_offset_cost / 1000:,.1f} k EUR")
    for name in (None, *st.biodiversity_offsets):
        p = net_positions(st, name)
        print(f"net income {'without offsets' if name is None else 'with ' + name:<24}"
              f"{p.net_income_eur / 1000:>14,.1f} k EUR")


if __name__ == "__main__":
    main()
